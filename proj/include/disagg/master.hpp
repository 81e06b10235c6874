#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "disagg/cuts.hpp"
#include "disagg/milp.hpp"

namespace disagg {

// Generator and PV side of the microgrid. The piecewise-linear generation
// cost has marginal cost marginal_costs[k] on [theta[k-1], theta[k]); only
// the first intercept alpha1 is free, continuity pins the rest.
struct MicrogridParams {
  int horizon = 0;
  std::vector<double> theta;           // K+1 breakpoints, theta[0] = 0, theta[K] = pg_max
  std::vector<double> marginal_costs;  // K values
  double alpha1 = 0.0;
  double start_cost = 0.0;
  double pg_min = 0.0;
  double pg_max = 0.0;
  std::vector<double> pv;  // length horizon

  int segments() const { return static_cast<int>(marginal_costs.size()); }
  void validate() const;
};

struct AggregateData {
  double sum_demand = 0.0;
  std::vector<double> sum_lower;
  std::vector<double> sum_upper;
};

// The master MILP with its variable layout and any accumulated cuts.
// Columns, in order: p_t, pg_t, pgk_{k,t} (k-major), b_on_t, b_st_t,
// b_seg_{k,t} for k = 1..K-1. Binaries: b_on, b_st, b_seg.
struct MilpInstance {
  MilpModel model;
  MicrogridParams params;
  AggregateData aggregates;
  std::vector<HoffmanCut> cuts;
  int base_rows = 0;  // rows before cut rows

  int horizon() const { return params.horizon; }
  int segments() const { return params.segments(); }
  int col_p(int t) const { return t; }
  int col_pg(int t) const { return horizon() + t; }
  int col_pgk(int k, int t) const { return horizon() * (2 + k) + t; }  // k = 0..K-1
  int col_bon(int t) const { return horizon() * (2 + segments()) + t; }
  int col_bst(int t) const { return horizon() * (3 + segments()) + t; }
  int col_bseg(int k, int t) const { return horizon() * (4 + segments() + k) + t; }  // k = 0..K-2
};

// Assembles the unit-commitment master:
//   min sum_t (alpha1 b_on_t + sum_k c_k pgk_{k,t} + start_cost b_st_t)
//   pg_t = sum_k pgk_{k,t}
//   segment fill order via b_seg, start/on logic, pg_min/pg_max gating,
//   p <= pv + pg, sum_t p_t = sum_demand, sum_lower <= p <= sum_upper,
//   plus one row per cut: sum_{t in t0} p_t <= a_t0.
MilpInstance build_microgrid_milp(const MicrogridParams& params, const AggregateData& aggregates,
                                  const std::vector<HoffmanCut>& cuts);

struct MilpSolution {
  enum class Status { Optimal, Infeasible };
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> p;
  std::vector<double> pg;
  std::vector<double> pgk;    // k-major, K*T entries
  std::vector<int> on, start;
  std::vector<double> x_full;  // every model column, audit-ready
  long nodes = 0;
};

MilpSolution solve_milp(const MilpInstance& inst, const std::optional<std::vector<double>>& hint = {});

// Piecewise-linear generation cost in cumulative form; audits the MILP
// objective. Requires 0 <= pg <= pg_max.
double gen_cost(double pg, const MicrogridParams& params);

// Row-by-row feasibility audit of a solution against the instance; returns
// human-readable violations beyond `tol` (empty means clean).
std::vector<std::string> audit_milp_solution(const MilpInstance& inst, const MilpSolution& sol, double tol = 1e-6);

// One master problem in the cutting-plane loop: re-solved with a growing cut
// list, must yield the aggregate allocation.
class MasterProblem {
 public:
  virtual ~MasterProblem() = default;
  virtual MilpSolution solve(const std::vector<HoffmanCut>& cuts) = 0;
  virtual std::string describe() const = 0;
};

// The microgrid MILP master. Remembers the last optimal integer pattern and
// uses it to seed the next solve.
class MicrogridMaster : public MasterProblem {
 public:
  MicrogridMaster(MicrogridParams params, AggregateData aggregates);
  MilpSolution solve(const std::vector<HoffmanCut>& cuts) override;
  std::string describe() const override { return "microgrid-milp"; }

 private:
  MicrogridParams params_;
  AggregateData aggregates_;
  std::optional<std::vector<double>> hint_;
};

// Minimal linear master: min cost . p over the aggregate box and balance,
// plus cuts. Used by small regressions where the full MILP is beside the
// point.
class LinearMaster : public MasterProblem {
 public:
  LinearMaster(std::vector<double> cost, AggregateData aggregates);
  MilpSolution solve(const std::vector<HoffmanCut>& cuts) override;
  std::string describe() const override { return "linear"; }

 private:
  std::vector<double> cost_;
  AggregateData aggregates_;
};

}  // namespace disagg

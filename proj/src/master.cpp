#include "disagg/master.hpp"

#include <cmath>
#include <sstream>

namespace disagg {

void MicrogridParams::validate() const {
  const int K = segments();
  if (horizon < 1) throw BuildError("microgrid: horizon must be positive");
  if (K < 1) throw BuildError("microgrid: need at least one cost segment");
  if (static_cast<int>(theta.size()) != K + 1) throw BuildError("microgrid: theta must have K+1 breakpoints");
  if (std::abs(theta[0]) > 1e-12) throw BuildError("microgrid: theta[0] must be 0");
  for (int k = 0; k + 1 <= K; ++k)
    if (!(theta[k] < theta[k + 1])) throw BuildError("microgrid: theta must be strictly increasing");
  if (std::abs(theta[K] - pg_max) > 1e-9 * std::max(1.0, pg_max))
    throw BuildError("microgrid: theta[K] must equal pg_max");
  if (!(pg_min <= pg_max)) throw BuildError("microgrid: pg_min > pg_max");
  if (static_cast<int>(pv.size()) != horizon) throw BuildError("microgrid: pv length mismatch");
}

MilpInstance build_microgrid_milp(const MicrogridParams& params, const AggregateData& aggregates,
                                  const std::vector<HoffmanCut>& cuts) {
  params.validate();
  const int T = params.horizon;
  const int K = params.segments();
  if (static_cast<int>(aggregates.sum_lower.size()) != T ||
      static_cast<int>(aggregates.sum_upper.size()) != T)
    throw BuildError("build_microgrid_milp: aggregate bound length mismatch");

  double lo_total = 0.0, hi_total = 0.0;
  for (int t = 0; t < T; ++t) {
    if (aggregates.sum_lower[t] > aggregates.sum_upper[t] + 1e-9)
      throw BuildError("build_microgrid_milp: aggregate lower exceeds upper");
    lo_total += aggregates.sum_lower[t];
    hi_total += aggregates.sum_upper[t];
  }
  const double scale = std::max(1.0, std::abs(aggregates.sum_demand));
  if (aggregates.sum_demand < lo_total - 1e-9 * scale || aggregates.sum_demand > hi_total + 1e-9 * scale)
    throw BuildError("build_microgrid_milp: aggregate demand outside aggregate bounds");

  MilpInstance inst;
  inst.params = params;
  inst.aggregates = aggregates;
  inst.cuts = cuts;

  LpModel& lp = inst.model.lp;
  auto& integer = inst.model.is_integer;

  // Columns in the documented order.
  for (int t = 0; t < T; ++t) lp.add_col(aggregates.sum_lower[t], aggregates.sum_upper[t], 0.0);  // p
  for (int t = 0; t < T; ++t) lp.add_col(0.0, params.pg_max, 0.0);                                // pg
  for (int k = 0; k < K; ++k) {
    const double width = params.theta[k + 1] - params.theta[k];
    for (int t = 0; t < T; ++t) lp.add_col(0.0, width, params.marginal_costs[k]);  // pgk
  }
  for (int t = 0; t < T; ++t) lp.add_col(0.0, 1.0, params.alpha1);      // b_on
  for (int t = 0; t < T; ++t) lp.add_col(0.0, 1.0, params.start_cost);  // b_st
  for (int k = 0; k + 1 < K; ++k)
    for (int t = 0; t < T; ++t) lp.add_col(0.0, 1.0, 0.0);  // b_seg

  integer.assign(lp.num_cols(), 0);
  for (int t = 0; t < T; ++t) {
    integer[inst.col_bon(t)] = 1;
    integer[inst.col_bst(t)] = 1;
  }
  for (int k = 0; k + 1 < K; ++k)
    for (int t = 0; t < T; ++t) integer[inst.col_bseg(k, t)] = 1;

  // pg_t = sum_k pgk_{k,t}
  for (int t = 0; t < T; ++t) {
    std::vector<std::pair<int, double>> coef{{inst.col_pg(t), 1.0}};
    for (int k = 0; k < K; ++k) coef.emplace_back(inst.col_pgk(k, t), -1.0);
    lp.add_row(0.0, 0.0, std::move(coef));
  }

  // Segments fill in order: segment k is forced full while k+1 is open.
  for (int k = 0; k < K; ++k) {
    const double width = params.theta[k + 1] - params.theta[k];
    for (int t = 0; t < T; ++t) {
      if (k + 1 < K)  // pgk >= width * b_seg_k
        lp.add_row(0.0, kInf, {{inst.col_pgk(k, t), 1.0}, {inst.col_bseg(k, t), -width}});
      if (k > 0)  // pgk <= width * b_seg_{k-1}
        lp.add_row(-kInf, 0.0, {{inst.col_pgk(k, t), 1.0}, {inst.col_bseg(k - 1, t), -width}});
    }
  }

  // Start/on logic; the horizon begins cold, so a first-period on is a start.
  for (int t = 0; t < T; ++t) {
    if (t == 0)
      lp.add_row(0.0, kInf, {{inst.col_bst(0), 1.0}, {inst.col_bon(0), -1.0}});
    else
      lp.add_row(0.0, kInf,
                 {{inst.col_bst(t), 1.0}, {inst.col_bon(t), -1.0}, {inst.col_bon(t - 1), 1.0}});
  }

  // Generator range gated by the on state.
  for (int t = 0; t < T; ++t) {
    lp.add_row(0.0, kInf, {{inst.col_pg(t), 1.0}, {inst.col_bon(t), -params.pg_min}});
    lp.add_row(-kInf, 0.0, {{inst.col_pg(t), 1.0}, {inst.col_bon(t), -params.pg_max}});
  }

  // Supply: consumption cannot exceed PV plus generation.
  for (int t = 0; t < T; ++t)
    lp.add_row(-kInf, params.pv[t], {{inst.col_p(t), 1.0}, {inst.col_pg(t), -1.0}});

  // Aggregate demand balance.
  {
    std::vector<std::pair<int, double>> coef;
    for (int t = 0; t < T; ++t) coef.emplace_back(inst.col_p(t), 1.0);
    lp.add_row(aggregates.sum_demand, aggregates.sum_demand, std::move(coef));
  }

  inst.base_rows = lp.num_rows();

  for (const HoffmanCut& cut : cuts) {
    std::vector<std::pair<int, double>> coef;
    for (int t : cut.t0) coef.emplace_back(inst.col_p(t), 1.0);
    lp.add_row(-kInf, cut.a_t0, std::move(coef));
  }
  return inst;
}

MilpSolution solve_milp(const MilpInstance& inst, const std::optional<std::vector<double>>& hint) {
  MilpOptions opts;
  opts.hint = hint;
  const MilpResult r = solve_milp_bb(inst.model, opts);

  MilpSolution sol;
  sol.nodes = r.nodes;
  if (r.status != MilpStatus::Optimal) return sol;

  const int T = inst.horizon();
  const int K = inst.segments();
  sol.status = MilpSolution::Status::Optimal;
  sol.objective = r.objective;
  sol.x_full = r.x;
  sol.p.resize(T);
  sol.pg.resize(T);
  sol.pgk.resize(static_cast<size_t>(K) * T);
  sol.on.resize(T);
  sol.start.resize(T);
  for (int t = 0; t < T; ++t) {
    sol.p[t] = r.x[inst.col_p(t)];
    sol.pg[t] = r.x[inst.col_pg(t)];
    sol.on[t] = static_cast<int>(std::lround(r.x[inst.col_bon(t)]));
    sol.start[t] = static_cast<int>(std::lround(r.x[inst.col_bst(t)]));
    for (int k = 0; k < K; ++k) sol.pgk[static_cast<size_t>(k) * T + t] = r.x[inst.col_pgk(k, t)];
  }
  return sol;
}

double gen_cost(double pg, const MicrogridParams& params) {
  if (pg < -1e-9 || pg > params.pg_max + 1e-9)
    throw std::domain_error("gen_cost: pg outside [0, pg_max]");
  double cost = params.alpha1;
  for (int k = 0; k < params.segments(); ++k) {
    const double width = params.theta[k + 1] - params.theta[k];
    const double seg = std::clamp(pg - params.theta[k], 0.0, width);
    cost += params.marginal_costs[k] * seg;
  }
  return cost;
}

std::vector<std::string> audit_milp_solution(const MilpInstance& inst, const MilpSolution& sol, double tol) {
  std::vector<std::string> bad;
  const LpModel& lp = inst.model.lp;
  if (sol.status != MilpSolution::Status::Optimal) {
    bad.push_back("solution not optimal");
    return bad;
  }
  if (static_cast<int>(sol.x_full.size()) != lp.num_cols()) {
    bad.push_back("solution vector length mismatch");
    return bad;
  }
  for (int j = 0; j < lp.num_cols(); ++j) {
    const double v = sol.x_full[j];
    if (v < lp.col_lb[j] - tol || v > lp.col_ub[j] + tol) {
      std::ostringstream os;
      os << "column " << j << " = " << v << " outside [" << lp.col_lb[j] << ", " << lp.col_ub[j] << "]";
      bad.push_back(os.str());
    }
    if (inst.model.is_integer[j] && std::abs(v - std::round(v)) > tol) {
      std::ostringstream os;
      os << "column " << j << " = " << v << " not integral";
      bad.push_back(os.str());
    }
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    double act = 0.0;
    for (const auto& [j, c] : lp.rows[i].coef) act += c * sol.x_full[j];
    if (act < lp.rows[i].lb - tol || act > lp.rows[i].ub + tol) {
      std::ostringstream os;
      os << "row " << i << " activity " << act << " outside [" << lp.rows[i].lb << ", " << lp.rows[i].ub
         << "]";
      bad.push_back(os.str());
    }
  }
  double obj = lp.obj_offset;
  for (int j = 0; j < lp.num_cols(); ++j) obj += lp.obj[j] * sol.x_full[j];
  if (std::abs(obj - sol.objective) > tol * std::max(1.0, std::abs(obj))) {
    std::ostringstream os;
    os << "objective mismatch: " << obj << " vs " << sol.objective;
    bad.push_back(os.str());
  }
  return bad;
}

MicrogridMaster::MicrogridMaster(MicrogridParams params, AggregateData aggregates)
    : params_(std::move(params)), aggregates_(std::move(aggregates)) {}

MilpSolution MicrogridMaster::solve(const std::vector<HoffmanCut>& cuts) {
  const MilpInstance inst = build_microgrid_milp(params_, aggregates_, cuts);
  MilpSolution sol = solve_milp(inst, hint_);
  if (sol.status == MilpSolution::Status::Optimal) hint_ = sol.x_full;
  return sol;
}

LinearMaster::LinearMaster(std::vector<double> cost, AggregateData aggregates)
    : cost_(std::move(cost)), aggregates_(std::move(aggregates)) {}

MilpSolution LinearMaster::solve(const std::vector<HoffmanCut>& cuts) {
  const int T = static_cast<int>(cost_.size());
  LpModel lp;
  for (int t = 0; t < T; ++t) lp.add_col(aggregates_.sum_lower[t], aggregates_.sum_upper[t], cost_[t]);
  {
    std::vector<std::pair<int, double>> coef;
    for (int t = 0; t < T; ++t) coef.emplace_back(t, 1.0);
    lp.add_row(aggregates_.sum_demand, aggregates_.sum_demand, std::move(coef));
  }
  for (const HoffmanCut& cut : cuts) {
    std::vector<std::pair<int, double>> coef;
    for (int t : cut.t0) coef.emplace_back(t, 1.0);
    lp.add_row(-kInf, cut.a_t0, std::move(coef));
  }
  LpSolver solver(lp);
  const LpResult r = solver.solve();
  MilpSolution sol;
  if (r.status != LpStatus::Optimal) return sol;
  sol.status = MilpSolution::Status::Optimal;
  sol.objective = r.objective;
  sol.p = r.x;
  sol.x_full = r.x;
  return sol;
}

}  // namespace disagg

#pragma once

#include <span>
#include <vector>

#include "disagg/types.hpp"

namespace disagg {

// One valid inequality sum_{t in t0} p_t <= a_t0 on aggregate allocations,
// together with the defining index sets. n0 is kept for audits only; it is
// never part of what the operator sees in the non-intrusive protocol.
struct HoffmanCut {
  std::vector<int> t0;   // nonempty, strictly contained in the period set
  double a_t0 = 0.0;
  std::vector<int> n0;
};

struct HoffmanWitness {
  std::vector<int> t_in;
  std::vector<int> n_in;
  double slack = 0.0;  // RHS - LHS of the circulation inequality
};

struct FeasibilityReport {
  bool feasible = false;
  HoffmanWitness witness;  // minimum-slack pair over all subsets
};

// Exhaustive circulation-feasibility check: for every T_in subset of periods
// the inequality
//   sum_{t not in T_in} p_t <=
//     sum_{t not in T_in, n in N_in} upper_{n,t}
//     - sum_{t in T_in, n not in N_in} lower_{n,t} + sum_{n not in N_in} E_n
// is evaluated with N_in chosen per agent by the independent minimization
// min(sum_{t not in T_in} upper_{n,t}, E_n - sum_{t in T_in} lower_{n,t});
// agent n joins N_in iff the first term is strictly smaller.
// Requires T <= 22 and sum p == sum E to 1e-9; feasible iff min slack >= -tol.
FeasibilityReport hoffman_feasible_bruteforce(std::span<const double> p,
                                              const std::vector<AgentConstraints>& agents);

// Independent oracle: feasibility of the circulation with lower bounds on the
// bipartite period->agent network, reduced to plain max-flow. Inputs are
// rounded to the 1e-6 grid so the answer is exact on the rounded instance.
bool maxflow_feasible(std::span<const double> p, const std::vector<AgentConstraints>& agents);

// Builds a violated cut from an orbit limit (x_inf, nu_inf):
//   t0 = { t : p_t - sum_n x_inf_{n,t} > t0_threshold }
//   n0 = { n : E_n - sum_{t not in t0} lower - sum_{t in t0} upper < -1e-9 }
//   a_t0 = sum_{t in t0} sum_n x_inf_{n,t}
// Throws TightenEpsError when t0 comes out empty (gap below the numeric
// floor; the caller must rerun the projections with a smaller eps).
HoffmanCut extract_cut(const ProfileMatrix& x_inf, std::span<const double> nu_inf, std::span<const double> p,
                       const std::vector<AgentConstraints>& agents, double t0_threshold);

// Tightest valid right-hand side for a given period set:
//   max over x in X of sum_{t in t0} sum_n x_{n,t}
//     = sum_n min(sum_{t in t0} upper_{n,t}, E_n - sum_{t not in t0} lower_{n,t}),
// which coincides with the (t0, n0) inequality bound. Used by audits.
double cut_bound_for(std::span<const int> t0, const std::vector<AgentConstraints>& agents);

}  // namespace disagg

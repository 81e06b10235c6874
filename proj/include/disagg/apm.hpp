#pragma once

#include <functional>
#include <vector>

#include "disagg/polytope.hpp"
#include "disagg/types.hpp"

namespace disagg {

enum class StopRule {
  YDisplacement,  // stop when ||y_k - y_{k-1}|| < eps
  XDisplacement,  // stop when ||x_k - x_{k-1}|| < eps (x_0 := y_0)
};

struct ApmConfig {
  double eps_cvg = 1e-8;
  long max_iters = 1000000;
  Norm norm = Norm::Euclidean;
  StopRule stop = StopRule::YDisplacement;
};

struct ApmResult {
  ProfileMatrix x_final;            // in X exactly (rows projected last)
  ProfileMatrix y_final;            // aggregates to p
  std::vector<double> nu_final;     // correction of the last aggregate projection
  long iterations = 0;              // each counts one x-then-y double projection
  double gap = 0.0;                 // ||x_final - y_final|| in cfg.norm
  bool converged = false;           // false: max_iters hit, last state carried here
};

// Called once per iteration with the fresh iterates.
using ApmObserver =
    std::function<void(long iter, const ProfileMatrix& x, const ProfileMatrix& y, const std::vector<double>& nu)>;

// Default start: each agent's clamped uniform split, y0_{n,t} = clamp(E_n/T, l, u).
ProfileMatrix default_start(const std::vector<AgentConstraints>& agents);

// Alternating projections between X = prod X_n and Y_p, starting from y0.
// Iterates x_k = P_X(y_{k-1}), y_k = P_Y(x_k) until the stop rule fires or
// max_iters is reached (then converged=false and the last state is returned).
ApmResult run_apm(std::span<const double> p, const std::vector<AgentConstraints>& agents, const ProfileMatrix& y0,
                  const ApmConfig& cfg, const ApmObserver& observer = {});

// Closed-form contraction-rate bound for these polytopes:
//   rho_NT = 1 - 4 / (N (T+1)^2 (T-1)),  strictly increasing in N and T.
// Requires T >= 2.
double rate_bound(int n_agents, int horizon);

// Smallest k >= 0 with 2 * initial_dist * rho^k <= eps.
long iteration_bound(double initial_dist, double eps, double rho);

}  // namespace disagg

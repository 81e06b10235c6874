#pragma once

#include <span>
#include <vector>

#include "disagg/types.hpp"

namespace disagg {

// Euclidean projection of y onto X_n = {x : sum x = demand, l <= x <= u}
// (continuous quadratic knapsack). The optimum is x_t = clamp(y_t + tau)
// where tau is a root of the nondecreasing piecewise-linear
//   g(tau) = sum_t clamp(y_t + tau, l_t, u_t) - demand.
// tau is located by an exact scan over the 2T sorted breakpoints
// {l_t - y_t, u_t - y_t}; no iterative tolerance. O(T log T).
// Throws InfeasibleAgentError when demand lies outside [sum l, sum u].
std::vector<double> project_agent(std::span<const double> y, const AgentConstraints& c);

// Euclidean projection of x onto Y_p = {y : column sums = p}:
//   y_{n,t} = x_{n,t} + nu_t,  nu = (p - column_sums(x)) / N.
struct AggregateProjection {
  ProfileMatrix y;
  std::vector<double> correction;  // nu
};
AggregateProjection project_aggregate(const ProfileMatrix& x, std::span<const double> p);

// Column sums, accumulated in ascending agent order for bit-reproducibility.
std::vector<double> aggregate(const ProfileMatrix& x);

}  // namespace disagg

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "disagg/errors.hpp"

namespace disagg {

// One agent's private data: total demand over the horizon plus per-period
// consumption bounds. The feasible set is
//   X_n = { x in R^T : sum_t x_t = demand, lower_t <= x_t <= upper_t }.
struct AgentConstraints {
  double demand = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;

  int periods() const { return static_cast<int>(lower.size()); }

  double lower_sum() const {
    double s = 0.0;
    for (double v : lower) s += v;
    return s;
  }
  double upper_sum() const {
    double s = 0.0;
    for (double v : upper) s += v;
    return s;
  }

  // Throws BuildError on malformed bounds, InfeasibleAgentError on empty X_n.
  void validate() const;
};

// N x T matrix of individual profiles, row n = agent n's profile.
struct ProfileMatrix {
  int agents = 0;
  int periods = 0;
  std::vector<double> data;  // row-major

  ProfileMatrix() = default;
  ProfileMatrix(int n, int t, double fill = 0.0)
      : agents(n), periods(t), data(static_cast<size_t>(n) * t, fill) {}

  double& at(int n, int t) { return data[static_cast<size_t>(n) * periods + t]; }
  double at(int n, int t) const { return data[static_cast<size_t>(n) * periods + t]; }

  std::span<double> row(int n) { return {data.data() + static_cast<size_t>(n) * periods, static_cast<size_t>(periods)}; }
  std::span<const double> row(int n) const {
    return {data.data() + static_cast<size_t>(n) * periods, static_cast<size_t>(periods)};
  }

  bool same_shape(const ProfileMatrix& o) const { return agents == o.agents && periods == o.periods; }
};

enum class Norm {
  Euclidean,       // Frobenius norm on N x T matrices
  OperatorMaxRow,  // max_n sum_t |x_{n,t}|
};

double profile_norm(const ProfileMatrix& m, Norm norm);
double profile_norm_diff(const ProfileMatrix& a, const ProfileMatrix& b, Norm norm);

inline double vec_norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double vec_norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace disagg

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "disagg/polytope.hpp"
#include "disagg/rng.hpp"
#include "disagg/types.hpp"

// Minimal always-on test harness: CHECK records and continues, REQUIRE stops
// the test. The binary exits nonzero if anything failed.

namespace testing {

inline long g_checks = 0;
inline long g_failures = 0;

inline void fail(const char* file, int line, const std::string& msg) {
  ++g_failures;
  std::fprintf(stderr, "[FAIL] %s:%d %s\n", file, line, msg.c_str());
}

inline int summary(const char* name) {
  if (testing::g_failures == 0) {
    std::printf("[PASS] %s: %ld checks\n", name, g_checks);
    return 0;
  }
  std::printf("[FAIL] %s: %ld of %ld checks failed\n", name, g_failures, g_checks);
  return 1;
}

}  // namespace testing

#define CHECK(cond)                                        \
  do {                                                     \
    ++testing::g_checks;                                   \
    if (!(cond)) testing::fail(__FILE__, __LINE__, #cond); \
  } while (0)

#define CHECK_MSG(cond, msg)                                                         \
  do {                                                                               \
    ++testing::g_checks;                                                             \
    if (!(cond)) testing::fail(__FILE__, __LINE__, std::string(#cond) + " | " + (msg)); \
  } while (0)

#define CHECK_NEAR(a, b, tol)                                                                       \
  do {                                                                                              \
    ++testing::g_checks;                                                                            \
    const double va = (a), vb = (b);                                                                \
    if (!(std::abs(va - vb) <= (tol)))                                                              \
      testing::fail(__FILE__, __LINE__,                                                             \
                    std::string(#a " ~ " #b) + " | " + std::to_string(va) + " vs " +                \
                        std::to_string(vb) + " (tol " + std::to_string(static_cast<double>(tol)) + \
                        ")");                                                                       \
  } while (0)

#define REQUIRE(cond)                                      \
  do {                                                     \
    ++testing::g_checks;                                   \
    if (!(cond)) {                                         \
      testing::fail(__FILE__, __LINE__, #cond);            \
      std::exit(1);                                        \
    }                                                      \
  } while (0)

#define TEST_MAIN(name)                       \
  int main() {                                \
    run_all();                                \
    return testing::summary(name);            \
  }

namespace testing {

using disagg::AgentConstraints;
using disagg::ProfileMatrix;
using disagg::Rng;

// Random box with positive widths; demand inside [sum lower, sum upper].
inline AgentConstraints random_agent(Rng& rng, int periods, double lo_max = 10.0, double width_max = 5.0) {
  AgentConstraints a;
  a.lower.resize(periods);
  a.upper.resize(periods);
  for (int t = 0; t < periods; ++t) a.lower[t] = rng.uniform(0.0, lo_max);
  for (int t = 0; t < periods; ++t) a.upper[t] = a.lower[t] + rng.uniform(0.0, width_max);
  a.demand = rng.uniform(a.lower_sum(), a.upper_sum());
  return a;
}

// Independent feasible-profile sampler (no projection code): water-fill with
// random weights, the fill level found by bisection on the monotone map
// s -> sum_t min(slack_t, w_t * s).
inline std::vector<double> random_feasible_profile(Rng& rng, const AgentConstraints& a) {
  const int T = a.periods();
  std::vector<double> w(T), slack(T);
  double need = a.demand - a.lower_sum();
  double total_slack = 0.0;
  for (int t = 0; t < T; ++t) {
    w[t] = rng.uniform(0.05, 1.0);
    slack[t] = a.upper[t] - a.lower[t];
    total_slack += slack[t];
  }
  std::vector<double> x(a.lower);
  if (need <= 0 || total_slack <= 0) return x;

  auto filled = [&](double s) {
    double f = 0.0;
    for (int t = 0; t < T; ++t) f += std::min(slack[t], w[t] * s);
    return f;
  };
  double hi = 1.0;
  while (filled(hi) < need && hi < 1e18) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (filled(mid) < need ? lo : hi) = mid;
  }
  double placed = 0.0;
  for (int t = 0; t < T; ++t) {
    const double add = std::min(slack[t], w[t] * hi);
    x[t] += add;
    placed += add;
  }
  // Settle the bisection residue on coordinates with room left.
  double residue = need - placed;
  for (int t = 0; t < T && std::abs(residue) > 0; ++t) {
    const double room = residue > 0 ? a.upper[t] - x[t] : a.lower[t] - x[t];
    const double move = residue > 0 ? std::min(residue, room) : std::max(residue, room);
    x[t] += move;
    residue -= move;
  }
  return x;
}

struct RandomInstance {
  std::vector<AgentConstraints> agents;
  std::vector<double> p;
};

// Feasible by construction: p aggregates profiles sampled strictly inside
// each box, so no non-trivial circulation inequality is tight and the
// instance stays feasible under small input rounding.
inline RandomInstance random_feasible_instance(Rng& rng, int n_agents, int periods) {
  RandomInstance inst;
  inst.p.assign(periods, 0.0);
  for (int n = 0; n < n_agents; ++n) {
    AgentConstraints a;
    a.lower.resize(periods);
    a.upper.resize(periods);
    double sum = 0.0;
    for (int t = 0; t < periods; ++t) {
      a.lower[t] = rng.uniform(0.0, 10.0);
      a.upper[t] = a.lower[t] + rng.uniform(0.2, 5.0);
      const double x = a.lower[t] + rng.uniform(0.03, 0.97) * (a.upper[t] - a.lower[t]);
      sum += x;
      inst.p[t] += x;
    }
    a.demand = sum;
    inst.agents.push_back(std::move(a));
  }
  return inst;
}

// Balanced (sum p = sum E) but not necessarily disaggregable: p lies on the
// balance hyperplane inside the aggregate box, kept off the box facets by a
// margin so the instance's slacks are generic.
inline RandomInstance random_balanced_instance(Rng& rng, int n_agents, int periods) {
  RandomInstance inst;
  double sum_e = 0.0;
  AgentConstraints box;  // aggregate box as a pseudo agent
  box.lower.assign(periods, 0.0);
  box.upper.assign(periods, 0.0);
  for (int n = 0; n < n_agents; ++n) {
    inst.agents.push_back(random_agent(rng, periods));
    sum_e += inst.agents.back().demand;
    for (int t = 0; t < periods; ++t) {
      box.lower[t] += inst.agents.back().lower[t];
      box.upper[t] += inst.agents.back().upper[t];
    }
  }
  box.demand = sum_e;
  const double room_lo = box.demand - box.lower_sum();
  const double room_hi = box.upper_sum() - box.demand;
  AgentConstraints shrunk = box;
  std::vector<double> y(periods);
  for (int t = 0; t < periods; ++t) {
    const double width = box.upper[t] - box.lower[t];
    const double margin =
        std::max(0.0, std::min({0.02 * width, room_lo / (2.0 * periods), room_hi / (2.0 * periods)}));
    shrunk.lower[t] += margin;
    shrunk.upper[t] -= margin;
    y[t] = rng.uniform(shrunk.lower[t], shrunk.upper[t]);
  }
  inst.p = disagg::project_agent(y, shrunk);
  return inst;
}

// Exhaustive tau search for the box-sum projection, used as an oracle:
// coarse grid then bisection on the monotone clamp sum.
inline std::vector<double> oracle_project_grid(std::span<const double> y, const AgentConstraints& a) {
  const int T = a.periods();
  auto g = [&](double tau) {
    double s = 0.0;
    for (int t = 0; t < T; ++t) s += std::clamp(y[t] + tau, a.lower[t], a.upper[t]);
    return s;
  };
  double span = 1.0;
  for (int t = 0; t < T; ++t)
    span = std::max({span, std::abs(a.lower[t] - y[t]), std::abs(a.upper[t] - y[t])});
  double lo = -span, hi = span;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < a.demand ? lo : hi) = mid;
  }
  std::vector<double> x(T);
  for (int t = 0; t < T; ++t) x[t] = std::clamp(y[t] + hi, a.lower[t], a.upper[t]);
  return x;
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace testing

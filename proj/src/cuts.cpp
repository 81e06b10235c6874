#include "disagg/cuts.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "disagg/maxflow.hpp"
#include "disagg/polytope.hpp"

namespace disagg {

namespace {

void check_balance(std::span<const double> p, const std::vector<AgentConstraints>& agents, const char* who) {
  double sum_p = 0.0, sum_e = 0.0;
  for (double v : p) sum_p += v;
  for (const auto& a : agents) sum_e += a.demand;
  const double tol = 1e-9 * std::max(1.0, std::abs(sum_e));
  if (std::abs(sum_p - sum_e) > tol) {
    std::ostringstream os;
    os << who << ": aggregate demand balance violated, sum p = " << sum_p << " vs sum E = " << sum_e;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

FeasibilityReport hoffman_feasible_bruteforce(std::span<const double> p,
                                              const std::vector<AgentConstraints>& agents) {
  const int T = static_cast<int>(p.size());
  const int N = static_cast<int>(agents.size());
  if (T > 22) throw std::invalid_argument("hoffman_feasible_bruteforce: T > 22, use maxflow_feasible");
  check_balance(p, agents, "hoffman_feasible_bruteforce");

  double sum_e = 0.0;
  for (const auto& a : agents) sum_e += a.demand;
  const double tol = 1e-9 * std::max(1.0, std::abs(sum_e));

  FeasibilityReport rep;
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  std::vector<int> best_n_in;
  std::vector<int> n_in;
  n_in.reserve(N);

  for (std::uint32_t mask = 0; mask < (1u << T); ++mask) {
    double lhs = 0.0;
    for (int t = 0; t < T; ++t)
      if (!(mask & (1u << t))) lhs += p[t];

    double rhs = 0.0;
    n_in.clear();
    for (int n = 0; n < N; ++n) {
      double out_upper = 0.0;  // sum_{t not in T_in} upper
      double in_lower = 0.0;   // sum_{t in T_in} lower
      for (int t = 0; t < T; ++t) {
        if (mask & (1u << t))
          in_lower += agents[n].lower[t];
        else
          out_upper += agents[n].upper[t];
      }
      const double stay = agents[n].demand - in_lower;
      if (out_upper < stay) {
        rhs += out_upper;
        n_in.push_back(n);
      } else {
        rhs += stay;  // ties keep n out of N_in
      }
    }

    const double slack = rhs - lhs;
    if (slack < best) {
      best = slack;
      best_mask = mask;
      best_n_in = n_in;
    }
  }

  rep.witness.slack = best;
  rep.witness.n_in = std::move(best_n_in);
  for (int t = 0; t < T; ++t)
    if (best_mask & (1u << t)) rep.witness.t_in.push_back(t);
  rep.feasible = best >= -tol;
  return rep;
}

bool maxflow_feasible(std::span<const double> p, const std::vector<AgentConstraints>& agents) {
  const int T = static_cast<int>(p.size());
  const int N = static_cast<int>(agents.size());
  check_balance(p, agents, "maxflow_feasible");

  // Scale to the 1e-6 integer grid; the circulation answer is exact on the
  // rounded instance.
  const double scale = 1e6;
  auto enc = [&](double v) { return static_cast<std::int64_t>(std::llround(v * scale)); };

  std::vector<std::int64_t> pe(T);
  std::int64_t sum_p = 0;
  for (int t = 0; t < T; ++t) {
    pe[t] = enc(p[t]);
    sum_p += pe[t];
  }
  std::vector<std::int64_t> ee(N);
  std::int64_t sum_e = 0;
  for (int n = 0; n < N; ++n) {
    ee[n] = enc(agents[n].demand);
    sum_e += ee[n];
  }
  // Rounding p and E independently can break the node balance by a few grid
  // units even though the real instance is balanced; spread the discrepancy
  // over p cyclically (sub-1e-5 effect).
  std::int64_t delta = sum_e - sum_p;
  for (int t = 0; delta != 0; t = (t + 1) % T) {
    const std::int64_t step = delta > 0 ? 1 : -1;
    pe[t] += step;
    delta -= step;
  }

  // Nodes: 0 = source hub s, 1..T periods, T+1..T+N agents, T+N+1 = sink hub w,
  // then the super source/sink of the lower-bound reduction.
  const int s = 0;
  const int w = T + N + 1;
  const int super_s = w + 1;
  const int super_t = w + 2;
  MaxFlow mf(w + 3);

  std::vector<std::int64_t> balance(w + 1, 0);  // inflow-lower minus outflow-lower
  auto add_arc = [&](int from, int to, std::int64_t lo, std::int64_t hi) {
    mf.add_edge(from, to, hi - lo);
    balance[to] += lo;
    balance[from] -= lo;
  };

  for (int t = 0; t < T; ++t) add_arc(s, 1 + t, pe[t], pe[t]);
  for (int t = 0; t < T; ++t)
    for (int n = 0; n < N; ++n)
      add_arc(1 + t, T + 1 + n, enc(agents[n].lower[t]), enc(agents[n].upper[t]));
  for (int n = 0; n < N; ++n) add_arc(T + 1 + n, w, ee[n], ee[n]);
  mf.add_edge(w, s, std::numeric_limits<std::int64_t>::max() / 4);  // close the circulation

  std::int64_t need = 0;
  for (int v = 0; v <= w; ++v) {
    if (balance[v] > 0) {
      mf.add_edge(super_s, v, balance[v]);
      need += balance[v];
    } else if (balance[v] < 0) {
      mf.add_edge(v, super_t, -balance[v]);
    }
  }

  return mf.max_flow(super_s, super_t) == need;
}

HoffmanCut extract_cut(const ProfileMatrix& x_inf, std::span<const double> nu_inf, std::span<const double> p,
                       const std::vector<AgentConstraints>& agents, double t0_threshold) {
  const int T = x_inf.periods;
  const int N = x_inf.agents;
  if (static_cast<int>(p.size()) != T || static_cast<int>(nu_inf.size()) != T ||
      static_cast<int>(agents.size()) != N)
    throw BuildError("extract_cut: dimension mismatch");

  const std::vector<double> sums = aggregate(x_inf);
  HoffmanCut cut;
  for (int t = 0; t < T; ++t)
    if (p[t] - sums[t] > t0_threshold) cut.t0.push_back(t);
  if (cut.t0.empty())
    throw TightenEpsError("extract_cut: empty t0, orbit gap below the numeric floor; tighten eps and rerun");

  std::vector<char> in_t0(T, 0);
  for (int t : cut.t0) in_t0[t] = 1;

  for (int n = 0; n < N; ++n) {
    double slack = agents[n].demand;
    for (int t = 0; t < T; ++t) slack -= in_t0[t] ? agents[n].upper[t] : agents[n].lower[t];
    if (slack < -1e-9) cut.n0.push_back(n);
  }

  cut.a_t0 = 0.0;
  for (int t : cut.t0) cut.a_t0 += sums[t];
  return cut;
}

double cut_bound_for(std::span<const int> t0, const std::vector<AgentConstraints>& agents) {
  if (agents.empty()) return 0.0;
  const int T = agents[0].periods();
  std::vector<char> in_t0(T, 0);
  for (int t : t0) in_t0[t] = 1;
  double bound = 0.0;
  for (const auto& a : agents) {
    double in_upper = 0.0, out_lower = 0.0;
    for (int t = 0; t < T; ++t) {
      if (in_t0[t])
        in_upper += a.upper[t];
      else
        out_lower += a.lower[t];
    }
    bound += std::min(in_upper, a.demand - out_lower);
  }
  return bound;
}

}  // namespace disagg

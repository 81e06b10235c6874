#include "disagg/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace disagg {

void AgentConstraints::validate() const {
  if (lower.size() != upper.size()) throw BuildError("agent bounds length mismatch");
  if (lower.empty()) throw BuildError("agent has no periods");
  for (size_t t = 0; t < lower.size(); ++t) {
    if (!(lower[t] <= upper[t]))
      throw BuildError("agent lower bound exceeds upper bound at period " + std::to_string(t));
    if (!std::isfinite(lower[t]) || !std::isfinite(upper[t]))
      throw BuildError("agent bounds must be finite");
  }
  const double sl = lower_sum();
  const double su = upper_sum();
  if (demand < sl || demand > su) {
    std::ostringstream os;
    os << "agent constraint set empty: demand " << demand << " outside [" << sl << ", " << su << "]";
    throw InfeasibleAgentError(os.str());
  }
}

double profile_norm(const ProfileMatrix& m, Norm norm) {
  if (norm == Norm::Euclidean) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return std::sqrt(s);
  }
  double best = 0.0;
  for (int n = 0; n < m.agents; ++n) {
    double row = 0.0;
    for (int t = 0; t < m.periods; ++t) row += std::abs(m.at(n, t));
    best = std::max(best, row);
  }
  return best;
}

double profile_norm_diff(const ProfileMatrix& a, const ProfileMatrix& b, Norm norm) {
  if (norm == Norm::Euclidean) {
    double s = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
      const double d = a.data[i] - b.data[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
  double best = 0.0;
  for (int n = 0; n < a.agents; ++n) {
    double row = 0.0;
    for (int t = 0; t < a.periods; ++t) row += std::abs(a.at(n, t) - b.at(n, t));
    best = std::max(best, row);
  }
  return best;
}

std::vector<double> project_agent(std::span<const double> y, const AgentConstraints& c) {
  const int T = static_cast<int>(y.size());
  if (T != c.periods()) throw BuildError("project_agent: dimension mismatch");

  double sum_lo = 0.0, sum_hi = 0.0;
  for (int t = 0; t < T; ++t) {
    sum_lo += c.lower[t];
    sum_hi += c.upper[t];
  }
  if (c.demand < sum_lo || c.demand > sum_hi) {
    std::ostringstream os;
    os << "project_agent: demand " << c.demand << " outside [" << sum_lo << ", " << sum_hi << "]";
    throw InfeasibleAgentError(os.str());
  }

  // Events: slope of g gains 1 at l_t - y_t, loses 1 at u_t - y_t.
  struct Event {
    double tau;
    int delta;
  };
  std::vector<Event> ev;
  ev.reserve(2 * static_cast<size_t>(T));
  for (int t = 0; t < T; ++t) {
    ev.push_back({c.lower[t] - y[t], +1});
    ev.push_back({c.upper[t] - y[t], -1});
  }
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
    if (a.tau != b.tau) return a.tau < b.tau;
    return a.delta > b.delta;
  });

  double tau;
  if (c.demand <= sum_lo) {
    tau = ev.front().tau;  // demand == sum of lower bounds
  } else {
    tau = ev.back().tau;  // fallback: demand == sum of upper bounds
    double g = sum_lo;    // value of sum_t clamp(y_t + tau) at ev.front().tau
    int slope = 0;
    size_t i = 0;
    while (i < ev.size()) {
      const double v = ev[i].tau;
      while (i < ev.size() && ev[i].tau == v) slope += ev[i++].delta;
      if (i == ev.size()) break;
      const double v_next = ev[i].tau;
      const double g_next = g + slope * (v_next - v);
      if (g_next >= c.demand) {
        tau = slope > 0 ? v + (c.demand - g) / slope : v;
        break;
      }
      g = g_next;
    }
  }

  std::vector<double> x(T);
  for (int t = 0; t < T; ++t) x[t] = std::clamp(y[t] + tau, c.lower[t], c.upper[t]);
  return x;
}

AggregateProjection project_aggregate(const ProfileMatrix& x, std::span<const double> p) {
  if (static_cast<int>(p.size()) != x.periods) throw BuildError("project_aggregate: dimension mismatch");
  AggregateProjection out;
  out.correction.resize(x.periods);
  const std::vector<double> sums = aggregate(x);
  for (int t = 0; t < x.periods; ++t) out.correction[t] = (p[t] - sums[t]) / x.agents;
  out.y = x;
  for (int n = 0; n < x.agents; ++n)
    for (int t = 0; t < x.periods; ++t) out.y.at(n, t) += out.correction[t];
  return out;
}

std::vector<double> aggregate(const ProfileMatrix& x) {
  std::vector<double> s(x.periods, 0.0);
  for (int n = 0; n < x.agents; ++n)
    for (int t = 0; t < x.periods; ++t) s[t] += x.at(n, t);
  return s;
}

}  // namespace disagg

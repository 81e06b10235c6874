#include "disagg/apm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace disagg {

ProfileMatrix default_start(const std::vector<AgentConstraints>& agents) {
  const int N = static_cast<int>(agents.size());
  const int T = agents.empty() ? 0 : agents[0].periods();
  ProfileMatrix y0(N, T);
  for (int n = 0; n < N; ++n) {
    const double split = agents[n].demand / T;
    for (int t = 0; t < T; ++t) y0.at(n, t) = std::clamp(split, agents[n].lower[t], agents[n].upper[t]);
  }
  return y0;
}

ApmResult run_apm(std::span<const double> p, const std::vector<AgentConstraints>& agents, const ProfileMatrix& y0,
                  const ApmConfig& cfg, const ApmObserver& observer) {
  const int N = static_cast<int>(agents.size());
  const int T = static_cast<int>(p.size());
  if (N < 1 || T < 1) throw BuildError("run_apm: empty instance");
  if (y0.agents != N || y0.periods != T) throw BuildError("run_apm: start shape mismatch");
  if (cfg.eps_cvg <= 0 || cfg.max_iters < 1) throw std::invalid_argument("run_apm: bad config");
  for (const auto& a : agents) a.validate();

  ProfileMatrix y_prev = y0;
  ProfileMatrix x_prev = y0;  // convention for the first x displacement
  ProfileMatrix x(N, T);
  ApmResult res;

  for (long k = 1; k <= cfg.max_iters; ++k) {
    for (int n = 0; n < N; ++n) {
      const std::vector<double> xn = project_agent(y_prev.row(n), agents[n]);
      std::copy(xn.begin(), xn.end(), x.row(n).begin());
    }
    AggregateProjection proj = project_aggregate(x, p);

    if (observer) observer(k, x, proj.y, proj.correction);

    const double disp = cfg.stop == StopRule::YDisplacement ? profile_norm_diff(proj.y, y_prev, cfg.norm)
                                                            : profile_norm_diff(x, x_prev, cfg.norm);
    res.iterations = k;
    x_prev = x;
    y_prev = std::move(proj.y);
    res.nu_final = std::move(proj.correction);
    if (disp < cfg.eps_cvg) {
      res.converged = true;
      break;
    }
  }

  res.x_final = std::move(x_prev);
  res.y_final = std::move(y_prev);
  res.gap = profile_norm_diff(res.x_final, res.y_final, cfg.norm);
  return res;
}

double rate_bound(int n_agents, int horizon) {
  if (n_agents < 1) throw std::invalid_argument("rate_bound: need N >= 1");
  if (horizon < 2) throw std::invalid_argument("rate_bound: need T >= 2");
  const double n = n_agents;
  const double t = horizon;
  return 1.0 - 4.0 / (n * (t + 1.0) * (t + 1.0) * (t - 1.0));
}

long iteration_bound(double initial_dist, double eps, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("iteration_bound: need 0 < rho < 1");
  if (!(eps > 0.0) || initial_dist < 0.0) throw std::invalid_argument("iteration_bound: bad arguments");
  if (2.0 * initial_dist <= eps) return 0;
  long k = static_cast<long>(std::ceil(std::log(eps / (2.0 * initial_dist)) / std::log(rho)));
  if (k < 0) k = 0;
  while (2.0 * initial_dist * std::pow(rho, static_cast<double>(k)) > eps) ++k;
  while (k > 0 && 2.0 * initial_dist * std::pow(rho, static_cast<double>(k - 1)) <= eps) --k;
  return k;
}

}  // namespace disagg

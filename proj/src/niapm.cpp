#include "disagg/niapm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "disagg/polytope.hpp"

namespace disagg {

NiapmResult run_niapm(std::span<const double> p, const std::vector<AgentConstraints>& agents,
                      const NiapmConfig& cfg, MessageLedger& ledger, const ApmObserver& observer) {
  const int N = static_cast<int>(agents.size());
  const int T = static_cast<int>(p.size());
  if (N < 2) throw std::invalid_argument("run_niapm: need at least two agents");
  if (!(cfg.eps_cvg0 > 0) || !(cfg.eps_dis > 0)) throw std::invalid_argument("run_niapm: bad tolerances");
  for (const auto& a : agents) a.validate();

  const double rho = rate_bound(N, T);
  const double b_const = cfg.b_const > 0 ? cfg.b_const : 2.0 / (1.0 - rho);
  if (!(b_const > 1.0 / (1.0 - rho)))
    throw std::invalid_argument("run_niapm: b_const must exceed 1/(1 - rate_bound)");

  double share_bound = cfg.share_bound;
  if (share_bound <= 0) {
    double max_e = 0.0;
    for (const auto& a : agents) max_e = std::max(max_e, std::abs(a.demand));
    share_bound = std::max(1.0, 2.0 * max_e);
  }
  SmcaConfig smca_cfg;
  smca_cfg.share_bound = share_bound;
  smca_cfg.mode = cfg.smca_mode;
  smca_cfg.fp_quantum = cfg.fp_quantum;

  ProfileMatrix y = default_start(agents);
  ProfileMatrix x_prev = y;  // convention: x_0 := y_0
  ProfileMatrix y_prev = y;
  ProfileMatrix x(N, T);
  std::vector<double> nu(T), S;

  NiapmResult res;
  double eps = cfg.eps_cvg0;
  long k = 0;

  while (true) {
    // Inner loop: run the protocol until the displacement drops below eps.
    while (true) {
      if (k >= cfg.max_total_iters) {
        std::ostringstream os;
        os << "run_niapm: iteration cap " << cfg.max_total_iters << " hit (eps=" << eps
           << ", halvings=" << res.stats.eps_halvings << ", gap=" << profile_norm_diff(x_prev, y_prev, cfg.norm)
           << ")";
        throw IterationCapError(os.str());
      }
      ++k;

      for (int n = 0; n < N; ++n) {
        const std::vector<double> xn = project_agent(y.row(n), agents[n]);
        std::copy(xn.begin(), xn.end(), x.row(n).begin());
      }

      S = smca(x, smca_cfg, Rng::combine(cfg.seed, static_cast<std::uint64_t>(k)), ledger, k);
      for (int t = 0; t < T; ++t) nu[t] = (p[t] - S[t]) / N;
      for (int n = 0; n < N; ++n) ledger.record(k, kOperator, n, PayloadKind::Nu, nu);

      y = x;
      for (int n = 0; n < N; ++n)
        for (int t = 0; t < T; ++t) y.at(n, t) += nu[t];

      ++res.stats.apm_iterations;
      ++res.stats.smca_rounds;
      if (observer) observer(k, x, y, nu);

      const double disp = cfg.stop == StopRule::XDisplacement ? profile_norm_diff(x, x_prev, cfg.norm)
                                                              : profile_norm_diff(y, y_prev, cfg.norm);
      x_prev = x;
      y_prev = y;
      if (disp < eps) break;
    }

    const double gap = profile_norm_diff(x, y, cfg.norm);
    if (gap <= cfg.eps_dis) {
      res.disag = true;
      res.x = x;
      res.stats.final_eps = eps;
      res.stats.gap = gap;
      return res;
    }

    // Candidate cut from operator-visible data only (nu and the sigma sums).
    const double threshold = 1.5 * b_const * eps;
    std::vector<int> t0;
    double a_t0 = 0.0, p_t0 = 0.0;
    for (int t = 0; t < T; ++t) {
      if (nu[t] > threshold) {
        t0.push_back(t);
        a_t0 += S[t];
        p_t0 += p[t];
      }
    }
    if (a_t0 - p_t0 < 0 && !t0.empty()) {
      res.disag = false;
      res.t0 = std::move(t0);
      res.a_t0 = a_t0;
      res.stats.final_eps = eps;
      res.stats.gap = gap;
      return res;
    }

    eps /= 2;  // need to rerun the projections with higher precision
    ++res.stats.eps_halvings;
    if (res.stats.eps_halvings > cfg.max_halvings) {
      std::ostringstream os;
      os << "run_niapm: halving cap " << cfg.max_halvings << " hit (eps=" << eps << ", gap=" << gap << ")";
      throw IterationCapError(os.str());
    }
  }
}

}  // namespace disagg

#include "disagg/smc.hpp"

#include <cmath>
#include <stdexcept>

namespace disagg {

const char* payload_kind_name(PayloadKind k) {
  switch (k) {
    case PayloadKind::Share:
      return "share";
    case PayloadKind::Sigma:
      return "sigma";
    case PayloadKind::Nu:
      return "nu";
  }
  return "?";
}

void MessageLedger::record(long round, int sender, int receiver, PayloadKind kind,
                           std::span<const double> payload) {
  ++total_;
  ++counts_[static_cast<int>(kind)][receiver == kOperator ? 1 : 0];
  if (mode_ == LedgerMode::CountsOnly) return;
  LedgerEntry e;
  e.round = round;
  e.sender = sender;
  e.receiver = receiver;
  e.kind = kind;
  if (mode_ == LedgerMode::Full) e.payload.assign(payload.begin(), payload.end());
  entries_.push_back(std::move(e));
}

long MessageLedger::count(PayloadKind kind, bool to_operator) const {
  return counts_[static_cast<int>(kind)][to_operator ? 1 : 0];
}

void MessageLedger::clear() {
  entries_.clear();
  total_ = 0;
  for (auto& row : counts_) {
    row[0] = 0;
    row[1] = 0;
  }
}

PrivacyReport audit_privacy(const MessageLedger& ledger, int observer) {
  PrivacyReport rep;
  if (observer == kOperator && ledger.mode() == LedgerMode::CountsOnly) {
    // Counters suffice for the operator-side audit.
    rep.visible_messages = ledger.count(PayloadKind::Share, true) + ledger.count(PayloadKind::Sigma, true) +
                           ledger.count(PayloadKind::Nu, true);
    rep.by_kind[payload_kind_name(PayloadKind::Sigma)] = ledger.count(PayloadKind::Sigma, true);
    if (ledger.count(PayloadKind::Share, true) > 0)
      rep.violations.push_back("operator received raw shares");
    if (ledger.count(PayloadKind::Nu, true) > 0)
      rep.violations.push_back("operator received correction broadcasts");
    rep.ok = rep.violations.empty();
    return rep;
  }
  if (ledger.mode() == LedgerMode::CountsOnly)
    throw std::logic_error("audit_privacy: per-agent audit needs a ledger with entries");

  for (const LedgerEntry& e : ledger.entries()) {
    if (e.receiver != observer) continue;
    ++rep.visible_messages;
    ++rep.by_kind[payload_kind_name(e.kind)];
    if (observer == kOperator) {
      if (e.kind != PayloadKind::Sigma) rep.violations.push_back("operator received non-sigma payload");
    } else {
      if (e.kind == PayloadKind::Share) {
        if (e.sender == observer) rep.violations.push_back("self-addressed share recorded as a message");
      } else if (e.kind == PayloadKind::Nu) {
        if (e.sender != kOperator) rep.violations.push_back("correction broadcast from a non-operator");
      } else {
        rep.violations.push_back("agent received an operator-only payload");
      }
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

std::vector<std::vector<double>> split_shares(std::span<const double> x_n, int n_agents, double share_bound,
                                              std::uint64_t rng_seed) {
  if (n_agents < 2) throw std::invalid_argument("split_shares: need at least two agents");
  if (!(share_bound > 0)) throw std::invalid_argument("split_shares: share bound must be positive");
  const int T = static_cast<int>(x_n.size());
  Rng rng = Rng::seeded(rng_seed);
  std::vector<std::vector<double>> parts(T, std::vector<double>(n_agents));
  for (int t = 0; t < T; ++t) {
    double acc = 0.0;
    for (int m = 0; m < n_agents - 1; ++m) {
      parts[t][m] = rng.uniform(0.0, share_bound);
      acc += parts[t][m];
    }
    parts[t][n_agents - 1] = x_n[t] - acc;  // balancing residual
  }
  return parts;
}

namespace {

std::vector<double> smca_floating(const ProfileMatrix& x, const SmcaConfig& cfg, std::uint64_t seed,
                                  MessageLedger& ledger, long round) {
  const int N = x.agents;
  const int T = x.periods;

  // shares[n][t][m]: part of x_{n,t} addressed to agent m.
  std::vector<std::vector<std::vector<double>>> shares(N);
  for (int n = 0; n < N; ++n)
    shares[n] = split_shares(x.row(n), N, cfg.share_bound, Rng::combine(seed, static_cast<std::uint64_t>(n)));

  std::vector<double> payload(T);
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < N; ++m) {
      if (m == n) continue;  // the part kept locally is not a message
      for (int t = 0; t < T; ++t) payload[t] = shares[n][t][m];
      ledger.record(round, n, m, PayloadKind::Share, payload);
    }
  }

  std::vector<double> S(T, 0.0);
  std::vector<double> sigma(T);
  for (int n = 0; n < N; ++n) {
    for (int t = 0; t < T; ++t) {
      double s = 0.0;
      for (int m = 0; m < N; ++m) s += shares[m][t][n];
      sigma[t] = s;
    }
    ledger.record(round, n, kOperator, PayloadKind::Sigma, sigma);
    for (int t = 0; t < T; ++t) S[t] += sigma[t];
  }
  return S;
}

std::vector<double> smca_fixed(const ProfileMatrix& x, const SmcaConfig& cfg, std::uint64_t seed,
                               MessageLedger& ledger, long round) {
  const int N = x.agents;
  const int T = x.periods;
  const double scale = 1.0 / cfg.fp_quantum;
  auto enc = [&](double v) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(v * scale))); };
  auto dec = [&](std::uint64_t v) { return static_cast<double>(static_cast<std::int64_t>(v)) * cfg.fp_quantum; };
  const std::uint64_t bound_enc = static_cast<std::uint64_t>(std::llround(cfg.share_bound * scale));
  if (N < 2) throw std::invalid_argument("smca: need at least two agents");
  if (bound_enc == 0) throw std::invalid_argument("smca: share bound too small for the fixed-point grid");

  // Wrapping uint64 arithmetic is the modular ring; every wrap cancels in the
  // final sum as long as the true totals fit in int64.
  std::vector<std::uint64_t> shares(static_cast<size_t>(N) * T * N);
  auto sh = [&](int n, int t, int m) -> std::uint64_t& {
    return shares[(static_cast<size_t>(n) * T + t) * N + m];
  };
  for (int n = 0; n < N; ++n) {
    Rng rng = Rng::seeded(Rng::combine(seed, static_cast<std::uint64_t>(n)));
    for (int t = 0; t < T; ++t) {
      std::uint64_t acc = 0;
      for (int m = 0; m < N - 1; ++m) {
        const std::uint64_t v = rng.uniform_u64(bound_enc);
        sh(n, t, m) = v;
        acc += v;
      }
      sh(n, t, N - 1) = enc(x.at(n, t)) - acc;
    }
  }

  std::vector<double> payload(T);
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < N; ++m) {
      if (m == n) continue;
      for (int t = 0; t < T; ++t) payload[t] = dec(sh(n, t, m));
      ledger.record(round, n, m, PayloadKind::Share, payload);
    }
  }

  std::vector<std::uint64_t> S(T, 0);
  std::vector<std::uint64_t> sigma(T);
  for (int n = 0; n < N; ++n) {
    for (int t = 0; t < T; ++t) {
      std::uint64_t s = 0;
      for (int m = 0; m < N; ++m) s += sh(m, t, n);
      sigma[t] = s;
    }
    for (int t = 0; t < T; ++t) payload[t] = dec(sigma[t]);
    ledger.record(round, n, kOperator, PayloadKind::Sigma, payload);
    for (int t = 0; t < T; ++t) S[t] += sigma[t];
  }

  std::vector<double> out(T);
  for (int t = 0; t < T; ++t) out[t] = dec(S[t]);
  return out;
}

}  // namespace

std::vector<double> smca(const ProfileMatrix& x, const SmcaConfig& cfg, std::uint64_t rng_seed,
                         MessageLedger& ledger, long round) {
  if (x.agents < 2) throw std::invalid_argument("smca: need at least two agents");
  if (!(cfg.share_bound > 0)) throw std::invalid_argument("smca: share bound must be positive");
  return cfg.mode == SmcaMode::Floating ? smca_floating(x, cfg, rng_seed, ledger, round)
                                        : smca_fixed(x, cfg, rng_seed, ledger, round);
}

std::vector<double> smca(const ProfileMatrix& x, double share_bound, std::uint64_t rng_seed,
                         MessageLedger& ledger, long round) {
  SmcaConfig cfg;
  cfg.share_bound = share_bound;
  return smca(x, cfg, rng_seed, ledger, round);
}

}  // namespace disagg

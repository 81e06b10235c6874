#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "disagg/rng.hpp"
#include "disagg/types.hpp"

namespace disagg {

// Receiver/sender id for the operator in ledger entries.
inline constexpr int kOperator = -1;

enum class PayloadKind {
  Share,  // agent -> agent, one T-vector of additive shares
  Sigma,  // agent -> operator, masked partial aggregate
  Nu,     // operator -> agent, correction broadcast
};

const char* payload_kind_name(PayloadKind k);

struct LedgerEntry {
  long round = 0;
  int sender = 0;
  int receiver = 0;
  PayloadKind kind = PayloadKind::Share;
  std::vector<double> payload;  // empty unless the ledger records payloads
};

enum class LedgerMode {
  Full,        // entries with payloads
  Metadata,    // entries without payloads
  CountsOnly,  // aggregated counters only (benchmark scale)
};

// Ordered record of every protocol message; appends follow the simulation's
// (round, sender, receiver) order. Privacy audits read it back.
class MessageLedger {
 public:
  explicit MessageLedger(LedgerMode mode = LedgerMode::Full) : mode_(mode) {}

  void record(long round, int sender, int receiver, PayloadKind kind, std::span<const double> payload);

  LedgerMode mode() const { return mode_; }
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  long count(PayloadKind kind, bool to_operator) const;
  long total() const { return total_; }
  void clear();

 private:
  LedgerMode mode_;
  std::vector<LedgerEntry> entries_;
  long counts_[3][2] = {};  // [kind][receiver==operator]
  long total_ = 0;
};

struct PrivacyReport {
  bool ok = false;
  long visible_messages = 0;
  std::map<std::string, long> by_kind;
  std::vector<std::string> violations;
};

// What a single party could learn from the recorded traffic. The operator
// may only ever receive sigma vectors; an agent receives shares addressed to
// it and correction broadcasts. Anything else is flagged.
PrivacyReport audit_privacy(const MessageLedger& ledger, int observer);

enum class SmcaMode {
  Floating,    // shares are doubles, sums accumulate rounding
  FixedPoint,  // shares on a 2^-40 grid, uint64 wrapping arithmetic, exact sums
};

struct SmcaConfig {
  double share_bound = 1.0;  // A: non-residual shares are drawn U([0, A])
  SmcaMode mode = SmcaMode::Floating;
  double fp_quantum = 0x1.0p-40;
};

// Splits one agent's profile into n_agents additive parts per period: parts
// 0..N-2 are i.i.d. U([0, share_bound]), the last part is the balancing
// residual (may be negative). parts[t][m] goes to agent m.
std::vector<std::vector<double>> split_shares(std::span<const double> x_n, int n_agents, double share_bound,
                                              std::uint64_t rng_seed);

// Full secure aggregation round: every agent splits its row into shares,
// shares travel between agents, each agent submits its masked partial sum
// sigma to the operator, and the operator adds the sigmas. Returns the
// aggregate S. All exchanges are recorded in the ledger under `round`.
std::vector<double> smca(const ProfileMatrix& x, const SmcaConfig& cfg, std::uint64_t rng_seed,
                         MessageLedger& ledger, long round = 0);

// Convenience overload with default floating-point mode.
std::vector<double> smca(const ProfileMatrix& x, double share_bound, std::uint64_t rng_seed,
                         MessageLedger& ledger, long round = 0);

}  // namespace disagg

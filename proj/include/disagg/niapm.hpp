#pragma once

#include <cstdint>
#include <vector>

#include "disagg/apm.hpp"
#include "disagg/smc.hpp"
#include "disagg/types.hpp"

namespace disagg {

struct NiapmConfig {
  double eps_cvg0 = 0.1;   // initial inner-loop tolerance
  double eps_dis = 0.01;   // disaggregation-gap tolerance
  double b_const = 0.0;    // 0 -> default 2/(1 - rate_bound(N,T)); must exceed 1/(1-rho)
  Norm norm = Norm::OperatorMaxRow;
  StopRule stop = StopRule::XDisplacement;
  double share_bound = 0.0;  // 0 -> 2 * max_n demand
  std::uint64_t seed = 1;
  SmcaMode smca_mode = SmcaMode::Floating;
  double fp_quantum = 0x1.0p-40;
  long max_total_iters = 10000000;  // hard cap, throws IterationCapError
  int max_halvings = 60;
};

struct NiapmStats {
  long apm_iterations = 0;  // main-loop passes (one double projection each)
  long smca_rounds = 0;
  int eps_halvings = 0;
  double final_eps = 0.0;
  double gap = 0.0;  // ||x - y|| in cfg.norm at exit
};

struct NiapmResult {
  bool disag = false;
  ProfileMatrix x;         // the agents' profiles when disag
  std::vector<int> t0;     // the emitted cut when !disag
  double a_t0 = 0.0;
  NiapmStats stats;
};

// Operator/agent split of the alternating projections with secure
// aggregation: agents project locally, the aggregate travels through SMCA,
// the operator broadcasts the correction nu. When the inner loop settles the
// operator either accepts an eps_dis-disaggregation or derives a violated cut
// (t0, a_t0) from nu and the last sigma round; if the candidate cut is not
// violated the tolerance is halved and the loop resumes where it stopped.
NiapmResult run_niapm(std::span<const double> p, const std::vector<AgentConstraints>& agents,
                      const NiapmConfig& cfg, MessageLedger& ledger, const ApmObserver& observer = {});

}  // namespace disagg

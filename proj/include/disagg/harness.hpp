#pragma once

#include <string>
#include <vector>

#include "disagg/instance.hpp"
#include "disagg/niapm.hpp"

namespace disagg {

inline constexpr const char* kVersion = "1.0.0";

struct RunMetrics {
  long n_master_problems = 0;
  long n_projections = 0;  // main-loop iterations summed over all calls
  long smca_rounds = 0;
  long eps_halvings = 0;
  double wall_time_s = 0.0;
  double objective = 0.0;
};

struct CutEvent {
  HoffmanCut cut;
  double violation = 0.0;  // sum_{t in t0} p - a_t0 at emission, > 0
  std::vector<double> p_trigger;
  long niapm_iterations = 0;
  int eps_halvings = 0;
  double master_objective = 0.0;
};

struct RunRecord {
  std::string version = kVersion;
  InstanceSpec instance;
  NiapmConfig config;
  AggregateData aggregates;  // operator-side data obtained through SMCA
  MilpSolution solution;     // final master solution
  ProfileMatrix profiles;    // final disaggregation held by the agents
  RunMetrics metrics;
  std::vector<CutEvent> events;
  bool privacy_ok = false;
};

struct CuttingLoopOptions {
  long max_masters = 20000;
  LedgerMode ledger_mode = LedgerMode::CountsOnly;
  MasterProblem* master = nullptr;  // optional override (default: microgrid MILP)
};

// Publishes the aggregate of each agent's demand, lower and upper bound
// vectors through three SMCA rounds; the operator side of the master model
// only ever sees these sums.
AggregateData aggregates_via_smca(const std::vector<AgentConstraints>& agents, double share_bound,
                                  std::uint64_t seed, MessageLedger& ledger);

// Cutting-plane driver: solve the master, attempt a non-intrusive
// disaggregation, append the emitted cut on failure, repeat. Stops at the
// first master solution that admits an eps_dis-disaggregation. Emitted t0
// sets must stay pairwise distinct; a repeat aborts the run.
RunRecord run_cutting_loop(const InstanceSpec& spec, const NiapmConfig& cfg, const CuttingLoopOptions& opts = {});

struct BenchRow {
  int n_agents = 0;
  std::uint64_t seed = 0;
  std::string status;  // "ok" or "error: ..."
  long n_master_problems = 0;
  long n_projections = 0;
  long eps_halvings = 0;
  double objective = 0.0;
  double wall_time_s = 0.0;
};

struct BenchSummary {
  int n_agents = 0;
  int instances = 0;
  int failures = 0;
  double mean_masters = 0.0;
  double mean_projections = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchSummary> summaries;
};

// Seeded scaling study: per_n instances per N value (instance i uses seed
// seed0 + i), run in parallel across instances, failures flagged per row.
// A nonempty trace_dir additionally writes each instance's full run record
// (production/consumption schedule included) as run_N<agents>_seed<seed>.json.
BenchResult run_benchmark(const std::vector<int>& n_values, int per_n, std::uint64_t seed0,
                          const NiapmConfig& cfg, int threads = 0, const std::string& trace_dir = "");

std::string bench_csv(const BenchResult& result);

// Re-audits every invariant a finished run promises: profiles in X_n,
// aggregation within eps_dis, distinct and valid cuts each violated by its
// trigger, master optimality reproduced, privacy flag. Returns problems.
std::vector<std::string> check_run(const RunRecord& record);

}  // namespace disagg

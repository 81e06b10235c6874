#include "disagg/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "disagg/json_io.hpp"
#include "disagg/polytope.hpp"
#include "disagg/rng.hpp"

namespace disagg {

namespace {

double default_share_bound(const std::vector<AgentConstraints>& agents) {
  double max_e = 0.0;
  for (const auto& a : agents) max_e = std::max(max_e, std::abs(a.demand));
  return std::max(1.0, 2.0 * max_e);
}

}  // namespace

AggregateData aggregates_via_smca(const std::vector<AgentConstraints>& agents, double share_bound,
                                  std::uint64_t seed, MessageLedger& ledger) {
  const int N = static_cast<int>(agents.size());
  const int T = agents.empty() ? 0 : agents[0].periods();

  ProfileMatrix demands(N, 1), lowers(N, T), uppers(N, T);
  for (int n = 0; n < N; ++n) {
    demands.at(n, 0) = agents[n].demand;
    for (int t = 0; t < T; ++t) {
      lowers.at(n, t) = agents[n].lower[t];
      uppers.at(n, t) = agents[n].upper[t];
    }
  }

  AggregateData agg;
  agg.sum_demand = smca(demands, share_bound, Rng::combine(seed, 1), ledger, -1)[0];
  agg.sum_lower = smca(lowers, share_bound, Rng::combine(seed, 2), ledger, -2);
  agg.sum_upper = smca(uppers, share_bound, Rng::combine(seed, 3), ledger, -3);

  // The masks can leave tiny negative widths on a tight box; keep the pair
  // ordered so the master model stays well formed.
  for (int t = 0; t < T; ++t)
    if (agg.sum_lower[t] > agg.sum_upper[t]) agg.sum_lower[t] = agg.sum_upper[t];
  return agg;
}

RunRecord run_cutting_loop(const InstanceSpec& spec, const NiapmConfig& cfg, const CuttingLoopOptions& opts) {
  spec.validate();
  const auto t_start = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.instance = spec;
  rec.config = cfg;

  MessageLedger ledger(opts.ledger_mode);
  const double share_bound = cfg.share_bound > 0 ? cfg.share_bound : default_share_bound(spec.agents);
  rec.config.share_bound = share_bound;

  rec.aggregates = aggregates_via_smca(spec.agents, share_bound, Rng::combine(cfg.seed, kStreamSmc), ledger);

  std::unique_ptr<MicrogridMaster> own_master;
  MasterProblem* master = opts.master;
  if (master == nullptr) {
    own_master = std::make_unique<MicrogridMaster>(spec.params, rec.aggregates);
    master = own_master.get();
  }

  std::vector<HoffmanCut> cuts;
  std::set<std::vector<int>> seen_t0;
  double last_obj = -kInf;

  for (long s = 0;; ++s) {
    if (s >= opts.max_masters) throw IterationCapError("run_cutting_loop: master cap exceeded");

    const MilpSolution sol = master->solve(cuts);
    ++rec.metrics.n_master_problems;
    if (sol.status != MilpSolution::Status::Optimal)
      throw BuildError("run_cutting_loop: master infeasible, aggregate data inconsistent");
    if (sol.objective < last_obj - 1e-9 * std::max(1.0, std::abs(last_obj)))
      throw NumericalError("run_cutting_loop: master objective decreased after a cut");
    last_obj = sol.objective;

    NiapmConfig call_cfg = cfg;
    call_cfg.share_bound = share_bound;
    call_cfg.seed = Rng::combine(cfg.seed, static_cast<std::uint64_t>(s) + 17);
    const NiapmResult res = run_niapm(sol.p, spec.agents, call_cfg, ledger);

    rec.metrics.n_projections += res.stats.apm_iterations;
    rec.metrics.smca_rounds += res.stats.smca_rounds;
    rec.metrics.eps_halvings += res.stats.eps_halvings;

    if (res.disag) {
      rec.solution = sol;
      rec.profiles = res.x;
      rec.metrics.objective = sol.objective;
      break;
    }

    if (seen_t0.count(res.t0))
      throw NumericalError("run_cutting_loop: repeated cut period set, numerics below tolerance");
    seen_t0.insert(res.t0);

    CutEvent ev;
    ev.cut = HoffmanCut{res.t0, res.a_t0, {}};
    ev.p_trigger = sol.p;
    ev.master_objective = sol.objective;
    ev.niapm_iterations = res.stats.apm_iterations;
    ev.eps_halvings = res.stats.eps_halvings;
    ev.violation = -res.a_t0;
    for (int t : res.t0) ev.violation += sol.p[t];
    rec.events.push_back(ev);
    cuts.push_back(rec.events.back().cut);
  }

  rec.privacy_ok = audit_privacy(ledger, kOperator).ok;

  rec.metrics.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rec;
}

BenchResult run_benchmark(const std::vector<int>& n_values, int per_n, std::uint64_t seed0,
                          const NiapmConfig& cfg, int threads, const std::string& trace_dir) {
  struct Job {
    int n_agents;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int n : n_values)
    for (int i = 0; i < per_n; ++i) jobs.push_back({n, seed0 + static_cast<std::uint64_t>(i)});

  BenchResult result;
  result.rows.resize(jobs.size());

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));

  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      const size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      const Job& job = jobs[idx];
      BenchRow& row = result.rows[idx];
      row.n_agents = job.n_agents;
      row.seed = job.seed;
      try {
        const InstanceSpec spec = generate_instance(job.n_agents, job.seed);
        NiapmConfig run_cfg = cfg;
        run_cfg.seed = job.seed;
        const RunRecord rec = run_cutting_loop(spec, run_cfg);
        if (!trace_dir.empty()) {
          std::ostringstream name;
          name << trace_dir << "/run_N" << job.n_agents << "_seed" << job.seed << ".json";
          write_file(name.str(), run_record_to_json(rec, true));
        }
        row.status = "ok";
        row.n_master_problems = rec.metrics.n_master_problems;
        row.n_projections = rec.metrics.n_projections;
        row.eps_halvings = rec.metrics.eps_halvings;
        row.objective = rec.metrics.objective;
        row.wall_time_s = rec.metrics.wall_time_s;
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
    }
  };

  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (int n : n_values) {
    BenchSummary s;
    s.n_agents = n;
    for (const BenchRow& row : result.rows) {
      if (row.n_agents != n) continue;
      ++s.instances;
      if (row.status != "ok") {
        ++s.failures;
        continue;
      }
      s.mean_masters += static_cast<double>(row.n_master_problems);
      s.mean_projections += static_cast<double>(row.n_projections);
    }
    const int ok = s.instances - s.failures;
    if (ok > 0) {
      s.mean_masters /= ok;
      s.mean_projections /= ok;
    }
    result.summaries.push_back(s);
  }
  return result;
}

std::string bench_csv(const BenchResult& result) {
  std::ostringstream os;
  os << "kind,n_agents,seed,status,n_master_problems,n_projections,eps_halvings,objective,wall_time_s\n";
  os.precision(12);
  for (const BenchRow& r : result.rows) {
    os << "run," << r.n_agents << ',' << r.seed << ',' << (r.status == "ok" ? "ok" : "error") << ','
       << r.n_master_problems << ',' << r.n_projections << ',' << r.eps_halvings << ',' << r.objective << ','
       << r.wall_time_s << "\n";
  }
  for (const BenchSummary& s : result.summaries) {
    os << "summary," << s.n_agents << ",," << (s.failures == 0 ? "ok" : "partial") << ',' << s.mean_masters
       << ',' << s.mean_projections << ",,," << "\n";
  }
  return os.str();
}

std::vector<std::string> check_run(const RunRecord& rec) {
  std::vector<std::string> bad;
  auto fail = [&](const std::string& msg) { bad.push_back(msg); };

  try {
    rec.instance.validate();
  } catch (const std::exception& e) {
    fail(std::string("instance invalid: ") + e.what());
    return bad;
  }

  const int N = rec.instance.n_agents;
  const int T = rec.instance.horizon;
  if (rec.profiles.agents != N || rec.profiles.periods != T) {
    fail("profiles shape mismatch");
    return bad;
  }

  // Profiles must sit in each agent's constraint set.
  for (int n = 0; n < N; ++n) {
    const auto& a = rec.instance.agents[n];
    double sum = 0.0;
    for (int t = 0; t < T; ++t) {
      const double v = rec.profiles.at(n, t);
      sum += v;
      if (v < a.lower[t] - 1e-9 || v > a.upper[t] + 1e-9) {
        fail("profile bound violation at agent " + std::to_string(n));
        break;
      }
    }
    if (std::abs(sum - a.demand) > 1e-9 * std::max(1.0, std::abs(a.demand)))
      fail("profile demand violation at agent " + std::to_string(n));
  }

  // Aggregation gap within eps_dis.
  {
    AggregateProjection proj = project_aggregate(rec.profiles, rec.solution.p);
    const double gap = profile_norm_diff(rec.profiles, proj.y, rec.config.norm);
    if (gap > rec.config.eps_dis + 1e-12) fail("disaggregation gap exceeds eps_dis");
  }

  // Cuts: pairwise distinct, valid, violated by their triggers.
  std::set<std::vector<int>> seen;
  for (size_t i = 0; i < rec.events.size(); ++i) {
    const CutEvent& ev = rec.events[i];
    if (!seen.insert(ev.cut.t0).second) fail("repeated cut t0 at event " + std::to_string(i));
    if (ev.cut.t0.empty() || static_cast<int>(ev.cut.t0.size()) >= T)
      fail("degenerate cut t0 at event " + std::to_string(i));
    const double bound = cut_bound_for(ev.cut.t0, rec.instance.agents);
    if (ev.cut.a_t0 < bound - 1e-6 * std::max(1.0, std::abs(bound)))
      fail("cut bound below the exact valid bound at event " + std::to_string(i));
    double lhs = 0.0;
    for (int t : ev.cut.t0) lhs += ev.p_trigger[t];
    if (!(lhs - ev.cut.a_t0 > 0)) fail("cut not violated by its trigger at event " + std::to_string(i));
    if (std::abs(lhs - ev.cut.a_t0 - ev.violation) > 1e-6 * std::max(1.0, std::abs(ev.violation)))
      fail("recorded violation mismatch at event " + std::to_string(i));
  }

  // Final p satisfies every cut.
  for (size_t i = 0; i < rec.events.size(); ++i) {
    double lhs = 0.0;
    for (int t : rec.events[i].cut.t0) lhs += rec.solution.p[t];
    if (lhs > rec.events[i].cut.a_t0 + 1e-7 * std::max(1.0, std::abs(rec.events[i].cut.a_t0)))
      fail("final p violates cut " + std::to_string(i));
  }

  // Master optimality reproduced on the recorded aggregates.
  if (!rec.solution.pg.empty()) {
    std::vector<HoffmanCut> cuts;
    for (const auto& ev : rec.events) cuts.push_back(ev.cut);
    try {
      const MilpInstance inst = build_microgrid_milp(rec.instance.params, rec.aggregates, cuts);
      const auto violations = audit_milp_solution(inst, rec.solution);
      for (const auto& v : violations) fail("solution audit: " + v);
      const MilpSolution fresh = solve_milp(inst);
      if (fresh.status != MilpSolution::Status::Optimal)
        fail("master re-solve infeasible");
      else if (std::abs(fresh.objective - rec.solution.objective) >
               1e-6 * std::max(1.0, std::abs(fresh.objective)))
        fail("master re-solve objective mismatch");
    } catch (const std::exception& e) {
      fail(std::string("master rebuild failed: ") + e.what());
    }
  }

  if (!rec.privacy_ok) fail("privacy audit flag not set");
  return bad;
}

}  // namespace disagg

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "disagg/json_io.hpp"
#include "disagg/mps.hpp"

using namespace disagg;

int main(int argc, char** argv) {
  CLI::App app{"Aggregate allocation with non-intrusive disaggregation"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a seeded scenario");
  int gen_agents = 20;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "spec.json";
  gen->add_option("--agents", gen_agents, "Number of agents")->envname("DISAGG_AGENTS");
  gen->add_option("--seed", gen_seed, "Scenario seed")->envname("DISAGG_SEED");
  gen->add_option("--out", gen_out, "Output path")->envname("DISAGG_OUT");

  // solve
  auto* solve = app.add_subcommand("solve", "Run the cutting-plane loop on a scenario");
  std::string solve_spec, solve_out = "run.json";
  NiapmConfig cfg;
  bool solve_fixed_point = false;
  solve->add_option("--spec", solve_spec, "Scenario file")->required()->envname("DISAGG_SPEC");
  solve->add_option("--out", solve_out, "Output path")->envname("DISAGG_OUT");
  solve->add_option("--eps-dis", cfg.eps_dis, "Disaggregation tolerance")->envname("DISAGG_EPS_DIS");
  solve->add_option("--eps-cvg", cfg.eps_cvg0, "Initial convergence tolerance")->envname("DISAGG_EPS_CVG");
  solve->add_option("--b-const", cfg.b_const, "Threshold constant (0 = auto)")->envname("DISAGG_B_CONST");
  solve->add_option("--share-bound", cfg.share_bound, "Share bound A (0 = auto)")
      ->envname("DISAGG_SHARE_BOUND");
  solve->add_option("--seed", cfg.seed, "Protocol seed")->envname("DISAGG_SEED");
  solve->add_flag("--fixed-point", solve_fixed_point, "Exact fixed-point aggregation")
      ->envname("DISAGG_FIXED_POINT");

  // bench
  auto* bench = app.add_subcommand("bench", "Scaling study over several agent counts");
  std::string bench_agents = "16,32,64";
  int bench_per_n = 10;
  std::uint64_t bench_seed = 1;
  int bench_threads = 0;
  std::string bench_out = "results.csv";
  NiapmConfig bench_cfg;
  bench->add_option("--agents", bench_agents, "Comma-separated agent counts")->envname("DISAGG_AGENTS");
  bench->add_option("--per-n", bench_per_n, "Instances per agent count")->envname("DISAGG_PER_N");
  bench->add_option("--seed", bench_seed, "First instance seed")->envname("DISAGG_SEED");
  bench->add_option("--threads", bench_threads, "Worker threads (0 = all)")->envname("DISAGG_THREADS");
  bench->add_option("--out", bench_out, "CSV output path")->envname("DISAGG_OUT");
  std::string bench_traces;
  bench->add_option("--trace-dir", bench_traces, "Write each instance's full run record here")
      ->envname("DISAGG_TRACE_DIR");
  bench->add_option("--eps-dis", bench_cfg.eps_dis, "Disaggregation tolerance")->envname("DISAGG_EPS_DIS");
  bench->add_option("--eps-cvg", bench_cfg.eps_cvg0, "Initial convergence tolerance")
      ->envname("DISAGG_EPS_CVG");

  // export-mps
  auto* exp = app.add_subcommand("export-mps", "Write the master model in MPS format");
  std::string exp_spec, exp_run, exp_out = "model.mps";
  exp->add_option("--spec", exp_spec, "Scenario file")->required()->envname("DISAGG_SPEC");
  exp->add_option("--run", exp_run, "Optional run file whose cuts are included")->envname("DISAGG_RUN");
  exp->add_option("--out", exp_out, "Output path")->envname("DISAGG_OUT");

  // check
  auto* check = app.add_subcommand("check", "Re-audit all invariants of a finished run");
  std::string check_run_path;
  check->add_option("--run", check_run_path, "Run file")->required()->envname("DISAGG_RUN");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const InstanceSpec spec = generate_instance(gen_agents, gen_seed);
      write_file(gen_out, instance_to_json(spec));
      std::printf("wrote %s (N=%d, seed=%llu)\n", gen_out.c_str(), spec.n_agents,
                  static_cast<unsigned long long>(spec.seed));
    } else if (solve->parsed()) {
      const InstanceSpec spec = instance_from_json(read_file(solve_spec));
      if (solve_fixed_point) cfg.smca_mode = SmcaMode::FixedPoint;
      const RunRecord rec = run_cutting_loop(spec, cfg);
      write_file(solve_out, run_record_to_json(rec, true));
      std::printf("solved: objective=%.6f masters=%ld projections=%ld cuts=%zu wall=%.2fs\n",
                  rec.metrics.objective, rec.metrics.n_master_problems, rec.metrics.n_projections,
                  rec.events.size(), rec.metrics.wall_time_s);
      std::printf("wrote %s\n", solve_out.c_str());
    } else if (bench->parsed()) {
      std::vector<int> n_values;
      std::string token;
      for (char c : bench_agents + ",") {
        if (c == ',') {
          if (!token.empty()) n_values.push_back(std::stoi(token));
          token.clear();
        } else {
          token += c;
        }
      }
      const BenchResult result =
          run_benchmark(n_values, bench_per_n, bench_seed, bench_cfg, bench_threads, bench_traces);
      write_file(bench_out, bench_csv(result));
      const std::string manifest = bench_out + ".manifest.json";
      write_file(manifest, bench_manifest_json(result, n_values, bench_per_n, bench_seed, bench_cfg));
      for (const BenchSummary& s : result.summaries)
        std::printf("N=%d: instances=%d failures=%d mean masters=%.1f mean projections=%.1f\n", s.n_agents,
                    s.instances, s.failures, s.mean_masters, s.mean_projections);
      std::printf("wrote %s and %s\n", bench_out.c_str(), manifest.c_str());
    } else if (exp->parsed()) {
      const InstanceSpec spec = instance_from_json(read_file(exp_spec));
      std::vector<HoffmanCut> cuts;
      AggregateData agg;
      if (!exp_run.empty()) {
        const RunRecord rec = run_record_from_json(read_file(exp_run));
        for (const auto& ev : rec.events) cuts.push_back(ev.cut);
        agg = rec.aggregates;
      } else {
        agg.sum_demand = 0.0;
        agg.sum_lower.assign(spec.horizon, 0.0);
        agg.sum_upper.assign(spec.horizon, 0.0);
        for (const auto& a : spec.agents) {
          agg.sum_demand += a.demand;
          for (int t = 0; t < spec.horizon; ++t) {
            agg.sum_lower[t] += a.lower[t];
            agg.sum_upper[t] += a.upper[t];
          }
        }
      }
      const MilpInstance inst = build_microgrid_milp(spec.params, agg, cuts);
      export_mps(inst, exp_out);
      std::printf("wrote %s (%d rows, %d cols, %zu cuts)\n", exp_out.c_str(), inst.model.lp.num_rows(),
                  inst.model.lp.num_cols(), cuts.size());
    } else if (check->parsed()) {
      const std::string text = read_file(check_run_path);
      const RunRecord rec = run_record_from_json(text);
      auto problems = check_run(rec);
      // The stored digest must match the embedded instance.
      const std::string canon = run_record_to_json(rec, false);
      const auto pos = text.find("\"instance_digest\"");
      const auto pos2 = canon.find("\"instance_digest\"");
      if (pos == std::string::npos || pos2 == std::string::npos ||
          text.substr(pos, 40) != canon.substr(pos2, 40))
        problems.push_back("instance digest mismatch");
      if (problems.empty()) {
        std::printf("check: all invariants hold (%zu cuts, objective %.6f)\n", rec.events.size(),
                    rec.metrics.objective);
      } else {
        for (const auto& p : problems) std::fprintf(stderr, "check: %s\n", p.c_str());
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

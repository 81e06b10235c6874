#include "disagg/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace disagg {

using json = nlohmann::ordered_json;

namespace {

json vec_json(const std::vector<double>& v) { return json(v); }
json vec_json(const std::vector<int>& v) { return json(v); }

std::vector<double> dvec(const json& j) { return j.get<std::vector<double>>(); }
std::vector<int> ivec(const json& j) { return j.get<std::vector<int>>(); }

const char* norm_name(Norm n) { return n == Norm::Euclidean ? "euclidean" : "op-max-row"; }
Norm norm_from(const std::string& s) {
  if (s == "euclidean") return Norm::Euclidean;
  if (s == "op-max-row") return Norm::OperatorMaxRow;
  throw IoError("unknown norm '" + s + "'");
}

const char* stop_name(StopRule s) { return s == StopRule::XDisplacement ? "x" : "y"; }
StopRule stop_from(const std::string& s) {
  if (s == "x") return StopRule::XDisplacement;
  if (s == "y") return StopRule::YDisplacement;
  throw IoError("unknown stop rule '" + s + "'");
}

const char* smca_name(SmcaMode m) { return m == SmcaMode::Floating ? "floating" : "fixed"; }
SmcaMode smca_from(const std::string& s) {
  if (s == "floating") return SmcaMode::Floating;
  if (s == "fixed") return SmcaMode::FixedPoint;
  throw IoError("unknown smca mode '" + s + "'");
}

json instance_json(const InstanceSpec& spec) {
  json j;
  j["format"] = "disagg-instance/1";
  j["n_agents"] = spec.n_agents;
  j["seed"] = spec.seed;
  j["horizon"] = spec.horizon;
  j["kappa"] = spec.kappa;
  json p;
  p["theta"] = vec_json(spec.params.theta);
  p["marginal_costs"] = vec_json(spec.params.marginal_costs);
  p["alpha1"] = spec.params.alpha1;
  p["start_cost"] = spec.params.start_cost;
  p["pg_min"] = spec.params.pg_min;
  p["pg_max"] = spec.params.pg_max;
  p["pv"] = vec_json(spec.params.pv);
  j["params"] = std::move(p);
  json agents = json::array();
  for (const auto& a : spec.agents) {
    json ja;
    ja["demand"] = a.demand;
    ja["lower"] = vec_json(a.lower);
    ja["upper"] = vec_json(a.upper);
    agents.push_back(std::move(ja));
  }
  j["agents"] = std::move(agents);
  return j;
}

InstanceSpec instance_from(const json& j) {
  if (j.value("format", "") != "disagg-instance/1") throw IoError("not a disagg-instance/1 document");
  InstanceSpec spec;
  spec.n_agents = j.at("n_agents").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.horizon = j.at("horizon").get<int>();
  spec.kappa = j.at("kappa").get<double>();
  const json& p = j.at("params");
  spec.params.horizon = spec.horizon;
  spec.params.theta = dvec(p.at("theta"));
  spec.params.marginal_costs = dvec(p.at("marginal_costs"));
  spec.params.alpha1 = p.at("alpha1").get<double>();
  spec.params.start_cost = p.at("start_cost").get<double>();
  spec.params.pg_min = p.at("pg_min").get<double>();
  spec.params.pg_max = p.at("pg_max").get<double>();
  spec.params.pv = dvec(p.at("pv"));
  for (const json& ja : j.at("agents")) {
    AgentConstraints a;
    a.demand = ja.at("demand").get<double>();
    a.lower = dvec(ja.at("lower"));
    a.upper = dvec(ja.at("upper"));
    spec.agents.push_back(std::move(a));
  }
  spec.validate();
  return spec;
}

json config_json(const NiapmConfig& cfg) {
  json j;
  j["eps_cvg0"] = cfg.eps_cvg0;
  j["eps_dis"] = cfg.eps_dis;
  j["b_const"] = cfg.b_const;
  j["norm"] = norm_name(cfg.norm);
  j["stop"] = stop_name(cfg.stop);
  j["share_bound"] = cfg.share_bound;
  j["seed"] = cfg.seed;
  j["smca_mode"] = smca_name(cfg.smca_mode);
  j["fp_quantum"] = cfg.fp_quantum;
  j["max_total_iters"] = cfg.max_total_iters;
  j["max_halvings"] = cfg.max_halvings;
  return j;
}

NiapmConfig config_from(const json& j) {
  NiapmConfig cfg;
  cfg.eps_cvg0 = j.at("eps_cvg0").get<double>();
  cfg.eps_dis = j.at("eps_dis").get<double>();
  cfg.b_const = j.at("b_const").get<double>();
  cfg.norm = norm_from(j.at("norm").get<std::string>());
  cfg.stop = stop_from(j.at("stop").get<std::string>());
  cfg.share_bound = j.at("share_bound").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.smca_mode = smca_from(j.at("smca_mode").get<std::string>());
  cfg.fp_quantum = j.at("fp_quantum").get<double>();
  cfg.max_total_iters = j.at("max_total_iters").get<long>();
  cfg.max_halvings = j.at("max_halvings").get<int>();
  return cfg;
}

}  // namespace

std::string instance_to_json(const InstanceSpec& spec) { return instance_json(spec).dump(2) + "\n"; }

InstanceSpec instance_from_json(const std::string& text) { return instance_from(json::parse(text)); }

std::string run_record_to_json(const RunRecord& rec, bool include_timing) {
  json j;
  j["format"] = "disagg-run/1";
  j["version"] = rec.version;
  const std::string inst_text = instance_json(rec.instance).dump();
  j["instance_digest"] = fnv1a64_hex(inst_text);
  j["instance"] = instance_json(rec.instance);
  j["config"] = config_json(rec.config);
  json agg;
  agg["sum_demand"] = rec.aggregates.sum_demand;
  agg["sum_lower"] = vec_json(rec.aggregates.sum_lower);
  agg["sum_upper"] = vec_json(rec.aggregates.sum_upper);
  j["aggregates"] = std::move(agg);
  json sol;
  sol["status"] = rec.solution.status == MilpSolution::Status::Optimal ? "optimal" : "infeasible";
  sol["objective"] = rec.solution.objective;
  sol["p"] = vec_json(rec.solution.p);
  sol["pg"] = vec_json(rec.solution.pg);
  sol["pgk"] = vec_json(rec.solution.pgk);
  sol["on"] = vec_json(rec.solution.on);
  sol["start"] = vec_json(rec.solution.start);
  sol["x_full"] = vec_json(rec.solution.x_full);
  sol["nodes"] = rec.solution.nodes;
  j["solution"] = std::move(sol);
  json profiles = json::array();
  for (int n = 0; n < rec.profiles.agents; ++n) {
    json row = json::array();
    for (int t = 0; t < rec.profiles.periods; ++t) row.push_back(rec.profiles.at(n, t));
    profiles.push_back(std::move(row));
  }
  j["profiles"] = std::move(profiles);
  json metrics;
  metrics["n_master_problems"] = rec.metrics.n_master_problems;
  metrics["n_projections"] = rec.metrics.n_projections;
  metrics["smca_rounds"] = rec.metrics.smca_rounds;
  metrics["eps_halvings"] = rec.metrics.eps_halvings;
  metrics["objective"] = rec.metrics.objective;
  j["metrics"] = std::move(metrics);
  json cuts = json::array();
  for (const CutEvent& ev : rec.events) {
    json jc;
    jc["t0"] = vec_json(ev.cut.t0);
    jc["a_t0"] = ev.cut.a_t0;
    jc["violation"] = ev.violation;
    jc["p_trigger"] = vec_json(ev.p_trigger);
    jc["niapm_iterations"] = ev.niapm_iterations;
    jc["eps_halvings"] = ev.eps_halvings;
    jc["master_objective"] = ev.master_objective;
    cuts.push_back(std::move(jc));
  }
  j["cuts"] = std::move(cuts);
  j["privacy_ok"] = rec.privacy_ok;
  if (include_timing) {
    json timing;
    timing["wall_time_s"] = rec.metrics.wall_time_s;
    j["timing"] = std::move(timing);
  }
  return j.dump(2) + "\n";
}

RunRecord run_record_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("format", "") != "disagg-run/1") throw IoError("not a disagg-run/1 document");
  RunRecord rec;
  rec.version = j.at("version").get<std::string>();
  rec.instance = instance_from(j.at("instance"));
  rec.config = config_from(j.at("config"));
  const json& agg = j.at("aggregates");
  rec.aggregates.sum_demand = agg.at("sum_demand").get<double>();
  rec.aggregates.sum_lower = dvec(agg.at("sum_lower"));
  rec.aggregates.sum_upper = dvec(agg.at("sum_upper"));
  const json& sol = j.at("solution");
  rec.solution.status = sol.at("status").get<std::string>() == "optimal" ? MilpSolution::Status::Optimal
                                                                         : MilpSolution::Status::Infeasible;
  rec.solution.objective = sol.at("objective").get<double>();
  rec.solution.p = dvec(sol.at("p"));
  rec.solution.pg = dvec(sol.at("pg"));
  rec.solution.pgk = dvec(sol.at("pgk"));
  rec.solution.on = ivec(sol.at("on"));
  rec.solution.start = ivec(sol.at("start"));
  rec.solution.x_full = dvec(sol.at("x_full"));
  rec.solution.nodes = sol.at("nodes").get<long>();
  const json& profiles = j.at("profiles");
  rec.profiles = ProfileMatrix(static_cast<int>(profiles.size()),
                               profiles.empty() ? 0 : static_cast<int>(profiles[0].size()));
  for (int n = 0; n < rec.profiles.agents; ++n)
    for (int t = 0; t < rec.profiles.periods; ++t) rec.profiles.at(n, t) = profiles[n][t].get<double>();
  const json& metrics = j.at("metrics");
  rec.metrics.n_master_problems = metrics.at("n_master_problems").get<long>();
  rec.metrics.n_projections = metrics.at("n_projections").get<long>();
  rec.metrics.smca_rounds = metrics.at("smca_rounds").get<long>();
  rec.metrics.eps_halvings = metrics.at("eps_halvings").get<long>();
  rec.metrics.objective = metrics.at("objective").get<double>();
  if (j.contains("timing")) rec.metrics.wall_time_s = j.at("timing").at("wall_time_s").get<double>();
  for (const json& jc : j.at("cuts")) {
    CutEvent ev;
    ev.cut.t0 = ivec(jc.at("t0"));
    ev.cut.a_t0 = jc.at("a_t0").get<double>();
    ev.violation = jc.at("violation").get<double>();
    ev.p_trigger = dvec(jc.at("p_trigger"));
    ev.niapm_iterations = jc.at("niapm_iterations").get<long>();
    ev.eps_halvings = jc.at("eps_halvings").get<int>();
    ev.master_objective = jc.at("master_objective").get<double>();
    rec.events.push_back(std::move(ev));
  }
  rec.privacy_ok = j.at("privacy_ok").get<bool>();
  return rec;
}

std::string bench_manifest_json(const BenchResult& result, const std::vector<int>& n_values, int per_n,
                                std::uint64_t seed0, const NiapmConfig& cfg) {
  json j;
  j["format"] = "disagg-bench/1";
  j["version"] = kVersion;
  j["n_values"] = json(n_values);
  j["instances_per_n"] = per_n;
  j["seed0"] = seed0;
  j["config"] = config_json(cfg);
  json sums = json::array();
  for (const BenchSummary& s : result.summaries) {
    json js;
    js["n_agents"] = s.n_agents;
    js["instances"] = s.instances;
    js["failures"] = s.failures;
    js["mean_masters"] = s.mean_masters;
    js["mean_projections"] = s.mean_projections;
    sums.push_back(std::move(js));
  }
  j["summaries"] = std::move(sums);
  return j.dump(2) + "\n";
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace disagg

#include "ovm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ovm/csv.hpp"
#include "ovm/error.hpp"
#include "ovm/rng.hpp"

namespace ovm {

using nlohmann::json;

#ifndef OVM_VERSION
#define OVM_VERSION "0.0.0"
#endif

double QSchedule::q_for(std::size_t n) const {
  const double dn = static_cast<double>(n);
  switch (kind) {
    case QScheduleKind::InverseSqrt: return 1.0 / std::sqrt(dn);
    case QScheduleKind::OneMinusPower: return 1.0 - std::pow(dn, -delta);
    case QScheduleKind::Constant: break;
  }
  fail(ErrorKind::ConfigError, "constant schedule has no N-dependent q");
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::ConfigError, what); };
  if (replicates < 1) bad("replicates must be at least 1");
  if (n_grid.empty()) bad("n_grid must not be empty");
  if (k < 2) bad("K must be at least 2");
  if (!(eps > 0.0 && eps < 0.5)) bad("eps must lie in (0, 1/2)");
  if (q_schedule.kind == QScheduleKind::Constant) {
    if (q_grid.empty()) bad("q_grid must not be empty without a q_schedule");
    for (double q : q_grid) {
      if (!(q >= 0.0 && q <= 1.0)) bad("q_grid values must lie in [0, 1]");
    }
  } else {
    if (!q_grid.empty()) bad("q_grid and a non-constant q_schedule are mutually exclusive");
    if (q_schedule.kind == QScheduleKind::OneMinusPower && !(q_schedule.delta > 0.0)) bad("delta must be positive");
  }
  for (std::size_t qi = 0; qi < q_points(); ++qi) {
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      try {
        params(qi, ni).validate();
      } catch (const Error& e) {
        bad(std::string("invalid grid point: ") + e.what());
      }
    }
  }
}

std::size_t ExperimentConfig::q_points() const {
  return q_schedule.kind == QScheduleKind::Constant ? q_grid.size() : 1;
}

double ExperimentConfig::q_at(std::size_t q_index, std::size_t n_index) const {
  if (q_schedule.kind == QScheduleKind::Constant) return q_grid.at(q_index);
  return q_schedule.q_for(n_grid.at(n_index));
}

ModelParams ExperimentConfig::params(std::size_t q_index, std::size_t n_index) const {
  ModelParams p;
  p.n = n_grid.at(n_index);
  p.k = k;
  p.q = q_at(q_index, n_index);
  p.eps = eps;
  p.init_opinions = init_opinions;
  p.init_graph = init_graph;
  return p;
}

namespace {

json schedule_to_json(const QSchedule& s) {
  switch (s.kind) {
    case QScheduleKind::Constant: return nullptr;
    case QScheduleKind::InverseSqrt: return json{{"kind", "inverse_sqrt"}};
    case QScheduleKind::OneMinusPower: return json{{"kind", "one_minus_power"}, {"delta", s.delta}};
  }
  return nullptr;
}

QSchedule schedule_from_json(const json& j) {
  QSchedule s;
  if (j.is_null()) return s;
  const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  if (kind == "constant") {
    s.kind = QScheduleKind::Constant;
  } else if (kind == "inverse_sqrt") {
    s.kind = QScheduleKind::InverseSqrt;
  } else if (kind == "one_minus_power") {
    s.kind = QScheduleKind::OneMinusPower;
    if (!j.is_object() || !j.contains("delta")) fail(ErrorKind::ConfigError, "one_minus_power needs delta");
    s.delta = j.at("delta").get<double>();
  } else {
    fail(ErrorKind::ConfigError, "unknown q_schedule '" + kind + "'");
  }
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) fail(ErrorKind::ConfigError, "config must be a JSON object");
    static const std::vector<std::string> known = {"name",     "q_grid",     "n_grid", "K",       "replicates",
                                                   "base_seed", "eps",       "q_schedule", "init", "workers",
                                                   "output_dir", "max_steps"};
    for (const auto& [key, value] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        fail(ErrorKind::ConfigError, "unknown config field '" + key + "'");
      }
    }
    c.name = j.value("name", c.name);
    if (j.contains("q_grid") && !j.at("q_grid").is_null()) c.q_grid = j.at("q_grid").get<std::vector<double>>();
    c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    c.k = j.value("K", 2u);
    c.replicates = j.at("replicates").get<std::size_t>();
    c.base_seed = j.value("base_seed", std::uint64_t{0});
    c.eps = j.value("eps", c.eps);
    if (j.contains("q_schedule")) c.q_schedule = schedule_from_json(j.at("q_schedule"));
    if (j.contains("init")) {
      const json& init = j.at("init");
      if (init.contains("opinions")) {
        const json& op = init.at("opinions");
        if (op.is_string()) {
          if (op.get<std::string>() != "balanced") fail(ErrorKind::ConfigError, "init.opinions must be 'balanced' or counts");
        } else {
          c.init_opinions = op.get<std::vector<std::size_t>>();
        }
      }
      if (init.contains("graph")) {
        const json& g = init.at("graph");
        if (g.is_string()) {
          if (g.get<std::string>() != "complete") fail(ErrorKind::ConfigError, "init.graph must be 'complete' or an edge list");
        } else {
          std::vector<EdgeKey> edges;
          for (const auto& pair : g) {
            const auto a = pair.at(0).get<std::size_t>();
            const auto b = pair.at(1).get<std::size_t>();
            if (a == 0 || b == 0 || a == b) fail(ErrorKind::ConfigError, "edge endpoints are distinct 1-based labels");
            edges.push_back(EdgeKey::of(static_cast<Vertex>(a - 1), static_cast<Vertex>(b - 1)));
          }
          c.init_graph = std::move(edges);
        }
      }
    }
    c.workers = j.value("workers", std::size_t{0});
    c.output_dir = j.value("output_dir", std::string{});
    c.max_steps = j.value("max_steps", std::uint64_t{0});
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigError, e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["q_grid"] = c.q_grid;
  j["n_grid"] = c.n_grid;
  j["K"] = c.k;
  j["replicates"] = c.replicates;
  j["base_seed"] = c.base_seed;
  j["eps"] = c.eps;
  j["q_schedule"] = schedule_to_json(c.q_schedule);
  json init;
  if (const auto* counts = std::get_if<std::vector<std::size_t>>(&c.init_opinions)) {
    init["opinions"] = *counts;
  } else {
    init["opinions"] = "balanced";
  }
  if (const auto* edges = std::get_if<std::vector<EdgeKey>>(&c.init_graph)) {
    json list = json::array();
    for (const EdgeKey& e : *edges) list.push_back({e.a + 1, e.b + 1});
    init["graph"] = list;
  } else {
    init["graph"] = "complete";
  }
  j["init"] = init;
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir.string();
  j["max_steps"] = c.max_steps;
  return j.dump(2);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t q_index, std::uint64_t n_index,
                          std::uint64_t replicate_index) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ q_index);
  h = splitmix64(h ^ n_index);
  return splitmix64(h ^ replicate_index);
}

double AggregateStats::probability(std::size_t count) const {
  return completed() == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(completed());
}

Interval AggregateStats::interval(std::size_t count) const {
  if (completed() == 0) return {0.0, 1.0};
  return wilson_interval(count, completed());
}

std::vector<AggregateStats> aggregate(const std::vector<RunRecord>& records) {
  std::vector<AggregateStats> out;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    while (j < records.size() && records[j].q_index == records[i].q_index && records[j].n_index == records[i].n_index) ++j;
    AggregateStats s;
    s.q_index = records[i].q_index;
    s.n_index = records[i].n_index;
    s.q = records[i].q;
    s.n = records[i].n;
    s.k = records[i].k;
    s.replicates = j - i;
    std::vector<double> tau, tau_seg, edges_seg, edges_dc, edges_cc, c1_seg, c2_seg, comps_seg;
    for (std::size_t r = i; r < j; ++r) {
      const RunRecord& rec = records[r];
      if (rec.status != RunStatus::Ok) {
        ++s.failed;
        continue;
      }
      const RunOutcome& o = rec.outcome;
      const auto tau_abs = static_cast<double>(o.tau_abs);
      const auto edges = static_cast<double>(o.edges_remaining);
      tau.push_back(tau_abs);
      s.eps_consensus += o.eps_consensus;
      switch (o.outcome_class) {
        case OutcomeClass::Segregation:
          ++s.segregation;
          s.strong_segregation += o.strong_segregation;
          tau_seg.push_back(tau_abs);
          edges_seg.push_back(edges);
          c1_seg.push_back(o.component_sizes.empty() ? 0.0 : static_cast<double>(o.component_sizes[0]));
          c2_seg.push_back(o.component_sizes.size() < 2 ? 0.0 : static_cast<double>(o.component_sizes[1]));
          comps_seg.push_back(static_cast<double>(o.component_sizes.size()));
          break;
        case OutcomeClass::DisconnectedConsensus:
          ++s.disconnected_consensus;
          edges_dc.push_back(edges);
          break;
        case OutcomeClass::ConnectedConsensus:
          ++s.connected_consensus;
          edges_cc.push_back(edges);
          break;
      }
    }
    auto opt_mean = [](const std::vector<double>& v) { return v.empty() ? std::nullopt : std::optional(mean(v)); };
    auto opt_median = [](const std::vector<double>& v) { return v.empty() ? std::nullopt : std::optional(median(v)); };
    s.mean_tau_abs = opt_mean(tau);
    s.median_tau_abs = opt_median(tau);
    s.mean_tau_abs_segregation = opt_mean(tau_seg);
    s.median_tau_abs_segregation = opt_median(tau_seg);
    s.mean_edges_remaining_segregation = opt_mean(edges_seg);
    s.mean_edges_remaining_disconnected_consensus = opt_mean(edges_dc);
    s.mean_edges_remaining_connected_consensus = opt_mean(edges_cc);
    s.mean_c1_segregation = opt_mean(c1_seg);
    s.mean_c2_segregation = opt_mean(c2_seg);
    s.mean_components_segregation = opt_mean(comps_seg);
    out.push_back(std::move(s));
    i = j;
  }
  return out;
}

std::vector<std::string> runs_header() {
  return {"q_index",        "n_index",         "replicate",       "q",          "N",
          "K",              "seed",            "status",          "outcome_class", "eps_consensus",
          "strong_segregation", "tau_abs",     "final_counts",    "z_min_final", "component_sizes",
          "n_components",   "c1",              "c2",              "c3",         "edges_remaining",
          "min_degree_final", "s_op_final",    "s_del_final"};
}

std::vector<std::string> aggregate_header() {
  std::vector<std::string> h = {"q_index", "n_index", "q", "N", "K", "replicates", "failed", "segregation",
                                "disconnected_consensus", "connected_consensus", "eps_consensus",
                                "strong_segregation"};
  for (const char* name : {"segregation", "disconnected_consensus", "connected_consensus", "eps_consensus",
                           "strong_segregation"}) {
    h.push_back(std::string("p_") + name);
    h.push_back(std::string("p_") + name + "_lo");
    h.push_back(std::string("p_") + name + "_hi");
  }
  for (const char* name : {"mean_tau_abs", "median_tau_abs", "mean_tau_abs_segregation", "median_tau_abs_segregation",
                           "mean_edges_remaining_segregation", "mean_edges_remaining_disconnected_consensus",
                           "mean_edges_remaining_connected_consensus", "mean_c1_segregation", "mean_c2_segregation",
                           "mean_components_segregation"}) {
    h.emplace_back(name);
  }
  return h;
}

namespace {

std::string status_text(RunStatus s) { return s == RunStatus::Ok ? "ok" : "budget_exceeded"; }

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

std::size_t component_at(const RunOutcome& o, std::size_t i) {
  return i < o.component_sizes.size() ? o.component_sizes[i] : 0;
}

}  // namespace

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << join(runs_header(), ',') << '\n';
  for (const RunRecord& r : records) {
    out << r.q_index << ',' << r.n_index << ',' << r.replicate << ',' << format_double(r.q) << ',' << r.n << ','
        << r.k << ',' << r.seed << ',' << status_text(r.status) << ',';
    if (r.status != RunStatus::Ok) {
      out << std::string(runs_header().size() - 9, ',') << '\n';
      continue;
    }
    const RunOutcome& o = r.outcome;
    out << to_string(o.outcome_class) << ',' << (o.eps_consensus ? 1 : 0) << ',' << (o.strong_segregation ? 1 : 0)
        << ',' << o.tau_abs << ',' << join_list(o.final_counts) << ',' << o.z_min_final << ','
        << join_list(o.component_sizes) << ',' << o.component_sizes.size() << ',' << component_at(o, 0) << ','
        << component_at(o, 1) << ',' << component_at(o, 2) << ',' << o.edges_remaining << ',' << o.min_degree_final
        << ',' << o.s_op_final << ',' << o.s_del_final << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateStats>& stats) {
  out << join(aggregate_header(), ',') << '\n';
  for (const AggregateStats& s : stats) {
    out << s.q_index << ',' << s.n_index << ',' << format_double(s.q) << ',' << s.n << ',' << s.k << ','
        << s.replicates << ',' << s.failed << ',' << s.segregation << ',' << s.disconnected_consensus << ','
        << s.connected_consensus << ',' << s.eps_consensus << ',' << s.strong_segregation;
    for (std::size_t count : {s.segregation, s.disconnected_consensus, s.connected_consensus, s.eps_consensus,
                              s.strong_segregation}) {
      if (s.completed() == 0) {
        out << ",,,";
        continue;
      }
      const Interval ci = s.interval(count);
      out << ',' << format_double(s.probability(count)) << ',' << format_double(ci.lower) << ','
          << format_double(ci.upper);
    }
    for (const auto* v : {&s.mean_tau_abs, &s.median_tau_abs, &s.mean_tau_abs_segregation,
                          &s.median_tau_abs_segregation, &s.mean_edges_remaining_segregation,
                          &s.mean_edges_remaining_disconnected_consensus,
                          &s.mean_edges_remaining_connected_consensus, &s.mean_c1_segregation,
                          &s.mean_c2_segregation, &s.mean_components_segregation}) {
      out << ',' << opt_text(*v);
    }
    out << '\n';
  }
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t nq = config.q_points();
  const std::size_t nn = config.n_grid.size();
  const std::size_t total = nq * nn * config.replicates;

  SweepResult result;
  result.records.resize(total);
  result.workers = config.workers != 0 ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  result.workers = std::min(result.workers, std::max<std::size_t>(total, 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      RunRecord& rec = result.records[job];
      rec.replicate = job % config.replicates;
      rec.n_index = (job / config.replicates) % nn;
      rec.q_index = job / (config.replicates * nn);
      rec.q = config.q_at(rec.q_index, rec.n_index);
      rec.n = config.n_grid[rec.n_index];
      rec.k = config.k;
      rec.seed = derive_seed(config.base_seed, rec.q_index, rec.n_index, rec.replicate);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        RunOptions options;
        options.max_steps = config.max_steps;
        rec.outcome = run_to_absorption(config.params(rec.q_index, rec.n_index), rec.seed, options);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BudgetExceeded) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = total;
          return;
        }
        rec.status = RunStatus::BudgetExceeded;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = total;
        return;
      }
      rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  if (result.workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < result.workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  result.aggregates = aggregate(result.records);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + config.output_dir.string() + ": " + ec.message());
    auto open = [&](const char* name) {
      std::ofstream f(config.output_dir / name, std::ios::binary | std::ios::trunc);
      if (!f) fail(ErrorKind::IoError, "cannot write " + (config.output_dir / name).string());
      return f;
    };
    {
      auto f = open("runs.csv");
      write_runs_csv(f, result.records);
      if (!f) fail(ErrorKind::IoError, "write failed for runs.csv");
    }
    {
      auto f = open("aggregate.csv");
      write_aggregate_csv(f, result.aggregates);
      if (!f) fail(ErrorKind::IoError, "write failed for aggregate.csv");
    }
    json manifest;
    manifest["name"] = config.name;
    manifest["software_version"] = OVM_VERSION;
    manifest["config"] = json::parse(config_to_json(config));
    manifest["runs"] = total;
    manifest["failed_runs"] = std::count_if(result.records.begin(), result.records.end(),
                                            [](const RunRecord& r) { return r.status != RunStatus::Ok; });
    manifest["workers"] = result.workers;
    manifest["total_wall_seconds"] = result.wall_seconds;
    json walls = json::array();
    for (const RunRecord& r : result.records) walls.push_back(r.wall_seconds);
    manifest["run_wall_seconds"] = walls;
    auto f = open("manifest.json");
    f << manifest.dump(2) << '\n';
    if (!f) fail(ErrorKind::IoError, "write failed for manifest.json");
  }
  return result;
}

}  // namespace ovm

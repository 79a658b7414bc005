#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ovm/asymptotics.hpp"
#include "ovm/csv.hpp"
#include "ovm/delayed.hpp"
#include "ovm/dynamics.hpp"
#include "ovm/error.hpp"
#include "ovm/experiments.hpp"
#include "ovm/regimes.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kAssertionFailed = 1;
constexpr int kBadInput = 2;

// Thrown by checks; maps to exit code 1.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json outcome_json(const ovm::RunOutcome& o) {
  return {{"outcome_class", ovm::to_string(o.outcome_class)},
          {"eps_consensus", o.eps_consensus},
          {"strong_segregation", o.strong_segregation},
          {"tau_abs", o.tau_abs},
          {"final_counts", o.final_counts},
          {"z_min_final", o.z_min_final},
          {"component_sizes", o.component_sizes},
          {"edges_remaining", o.edges_remaining},
          {"min_degree_final", o.min_degree_final},
          {"s_op_final", o.s_op_final},
          {"s_del_final", o.s_del_final},
          {"seed", o.seed}};
}

ovm::OpinionInit parse_init(const std::string& text) {
  if (text == "balanced") return ovm::Balanced{};
  std::vector<std::size_t> counts;
  for (const auto& field : ovm::split(text, ',')) {
    try {
      counts.push_back(std::stoull(field));
    } catch (const std::exception&) {
      ovm::fail(ovm::ErrorKind::ConfigError, "--init expects 'balanced' or comma-separated counts");
    }
  }
  return counts;
}

// Whitespace-separated 1-based vertex pairs, one per line; '#' starts a comment.
std::vector<ovm::EdgeKey> read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) ovm::fail(ovm::ErrorKind::IoError, "cannot read edge list " + path);
  std::vector<ovm::EdgeKey> edges;
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    std::istringstream fields(line);
    long long a = 0, b = 0;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || a < 1 || b < 1 || a == b) {
      ovm::fail(ovm::ErrorKind::ConfigError, "bad edge line '" + line + "'");
    }
    edges.push_back(ovm::EdgeKey::of(static_cast<ovm::Vertex>(a - 1), static_cast<ovm::Vertex>(b - 1)));
  }
  return edges;
}

void expect(bool ok, const std::string& what) {
  std::printf("%s  %s\n", ok ? "PASS" : "FAIL", what.c_str());
  if (!ok) throw CheckFailed(what);
}

std::string num(double v) { return ovm::format_double(v); }

// For human-readable check output.
std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- check suites -------------------------------------------------------

void check_invariants() {
  std::size_t runs = 0;
  for (unsigned k : {2u, 3u}) {
    for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        ovm::ModelParams p;
        p.n = 32;
        p.k = k;
        p.q = q;
        ovm::RunOptions opt;
        opt.verify_every = 1;
        const auto out = ovm::run_to_absorption(p, seed, opt);
        if (q == 0.0) expect(out.final_counts == p.initial_counts(), "q=0 keeps initial counts");
        if (q == 1.0) expect(out.outcome_class == ovm::OutcomeClass::ConnectedConsensus, "q=1 connected consensus");
        ++runs;
      }
    }
  }
  expect(true, std::to_string(runs) + " runs verified at every step");
  ovm::ModelParams p;
  p.n = 64;
  p.q = 0.5;
  const auto walk = ovm::opinion_walk_check(p, 200, 1);
  expect(walk.pass, "opinion walk fair and sign-independent (z " + brief(walk.frequency_z) + ", runs p " +
                        brief(walk.runs_p) + ")");
}

void check_coupling(std::size_t equivalence_runs) {
  ovm::ModelParams p;
  p.n = 64;
  p.q = 0.5;
  std::size_t violations = 0;
  for (std::size_t r = 0; r < 100; ++r) {
    violations += ovm::run_delayed(p, ovm::substream_seed(64, r), {}, true).report.first_violation.has_value();
  }
  expect(violations == 0, "deletion graph inside model graph over 100 runs");
  const auto rep = ovm::jump_chain_equivalence(6, 0.5, equivalence_runs, 2);
  expect(rep.total_variation <= 0.02, "jump-chain total variation " + brief(rep.total_variation));
  expect(rep.p_value >= 0.001, "jump-chain chi-square p " + brief(rep.p_value));
}

void check_oracle() {
  const auto curve = ovm::srw_exit_survival(200, 100, 40000);
  for (double x : {0.05, 0.1, 0.2, 0.5, 1.0}) {
    const double diff = std::abs(curve.at_scaled_time(x) - ovm::beta(x).value);
    expect(diff <= 0.01, "x=" + brief(x) + " |DP - beta| " + brief(diff));
  }
}

void check_lemma64() {
  const double p512 = ovm::deletion_bound_probability({512, 0.3, 1.1});
  expect(p512 >= 0.999, "N=512 deletion bound " + brief(p512));
  const ovm::DeletionBoundParams small{128, 0.3, 1.1};
  const double exact = ovm::deletion_bound_probability(small);
  const auto mc = ovm::negative_binomial_tail_monte_carlo(small.k(), small.q, small.threshold(), 10000, 3);
  const double se = std::sqrt(exact * (1 - exact) / 10000.0);
  expect(std::abs(mc.estimate - exact) <= 3 * se, "N=128 Monte Carlo " + brief(mc.estimate) + " vs " + brief(exact));
}

void check_regime(ovm::RegimeKind kind, const ovm::RegimeParams& params) {
  const auto r = ovm::regime_check(kind, params);
  for (const auto& pt : r.points) {
    std::printf("      %s N=%zu q=%s p_hat=%s ci=[%s, %s]%s\n", std::string(ovm::to_string(kind)).c_str(), pt.n,
                brief(pt.q).c_str(), brief(pt.p_hat).c_str(), brief(pt.ci.lower).c_str(), brief(pt.ci.upper).c_str(),
                pt.prediction ? (" prediction=" + brief(*pt.prediction)).c_str() : "");
  }
  const double last = r.points.back().p_hat;
  switch (kind) {
    case ovm::RegimeKind::Thm32:
      expect(r.monotone_non_decreasing, "thm32 probability non-decreasing in N");
      expect(last >= 0.85, "thm32 probability at largest N >= 0.85");
      break;
    case ovm::RegimeKind::Thm34: expect(last >= 0.95, "thm34 probability at largest N >= 0.95"); break;
    case ovm::RegimeKind::Prop45: expect(last >= 0.5, "prop45 probability >= 0.5"); break;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offended voter model simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", OVM_VERSION);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one simulation to absorption and print its outcome as JSON");
  ovm::ModelParams sp;
  std::uint64_t sim_seed = 0, sim_max_steps = 0;
  std::string sim_init = "balanced", sim_edges, sim_trace;
  sim->add_option("--n", sp.n, "population size")->required();
  sim->add_option("--q", sp.q, "voting probability")->required();
  sim->add_option("--k", sp.k, "number of opinions")->capture_default_str();
  sim->add_option("--eps", sp.eps, "almost-consensus threshold")->capture_default_str();
  sim->add_option("--seed", sim_seed, "run seed")->capture_default_str();
  sim->add_option("--init", sim_init, "'balanced' or comma-separated opinion counts")->capture_default_str();
  sim->add_option("--edges", sim_edges, "initial edge list file (1-based pairs); default complete graph");
  sim->add_option("--trace-out", sim_trace, "write a per-step trace to this file");
  sim->add_option("--max-steps", sim_max_steps, "step budget (0 = none)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep from a JSON config");
  std::string sweep_config, sweep_out;
  std::optional<std::size_t> sweep_workers;
  sweep->add_option("--config", sweep_config, "config file")->required();
  sweep->add_option("--workers", sweep_workers, "override the worker count");
  sweep->add_option("--output-dir", sweep_out, "override output_dir");

  // figures
  auto* figs = app.add_subcommand("figures", "write figure datasets from a sweep directory");
  std::vector<int> fig_which{1, 2, 3, 4};
  std::string fig_from, fig_out;
  figs->add_option("--which", fig_which, "figure number(s), all four by default")->check(CLI::Range(1, 4));
  figs->add_option("--from", fig_from, "sweep directory")->required();
  figs->add_option("--out", fig_out, "output directory (default: the sweep directory)");

  // check
  auto* check = app.add_subcommand("check", "run a verification suite");
  std::string suite;
  std::vector<std::string> regimes;
  std::vector<std::size_t> ladder;
  std::optional<std::size_t> check_reps;
  std::size_t check_workers = 0, eq_runs = 50000;
  check->add_option("--suite", suite, "suite to run")
      ->required()
      ->check(CLI::IsMember({"invariants", "coupling", "oracle", "lemma64", "regimes"}));
  check->add_option("--regime", regimes, "thm32, thm34 and/or prop45 (default all)")->delimiter(',');
  check->add_option("--ladder", ladder, "override the N ladder")->delimiter(',');
  check->add_option("--replicates", check_reps, "override replicates");
  check->add_option("--workers", check_workers, "worker threads (0 = hardware concurrency)");
  check->add_option("--equivalence-runs", eq_runs, "runs per model for the jump-chain comparison")
      ->capture_default_str();

  // beta
  auto* beta = app.add_subcommand("beta", "evaluate the exit-time limit series");
  double beta_x = 0.0, beta_tol = ovm::kDefaultSeriesTolerance;
  beta->add_option("--x", beta_x, "scaled time")->required();
  beta->add_option("--tol", beta_tol, "truncation tolerance")->capture_default_str();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact survival curve of the walk on {0..n}");
  std::size_t or_n = 0, or_start = 0, or_horizon = 0, or_every = 1;
  oracle->add_option("--n", or_n, "interval width")->required();
  oracle->add_option("--start", or_start, "starting site")->required();
  oracle->add_option("--horizon", or_horizon, "number of steps")->required();
  oracle->add_option("--every", or_every, "print every this many steps")->capture_default_str();

  // bounds
  auto* bounds = app.add_subcommand("bounds", "asymptotic probability bounds and deletion thresholds");
  double b_q = 0.3, b_c = 0.5, b_cp = 0.0, b_eps = 0.25, b_kappa = 0.5;
  std::size_t b_n = 0;
  bounds->add_option("--q", b_q)->capture_default_str();
  bounds->add_option("--c", b_c)->capture_default_str();
  bounds->add_option("--c-prime", b_cp)->capture_default_str();
  bounds->add_option("--eps", b_eps)->capture_default_str();
  bounds->add_option("--kappa", b_kappa)->capture_default_str();
  bounds->add_option("--n", b_n, "population size for the deletion-graph horizons");

  // audit
  auto* aud = app.add_subcommand("audit", "deletion-graph connectivity and degree audit (CSV to stdout)");
  ovm::ModelParams ap;
  double a_kappa = 0.5, a_eps = 0.2;
  std::size_t a_runs = 100;
  std::uint64_t a_seed = 66;
  aud->add_option("--n", ap.n)->required();
  aud->add_option("--q", ap.q)->required();
  aud->add_option("--kappa", a_kappa)->capture_default_str();
  aud->add_option("--eps", a_eps)->capture_default_str();
  aud->add_option("--runs", a_runs)->capture_default_str();
  aud->add_option("--seed", a_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*sim) {
      sp.init_opinions = parse_init(sim_init);
      if (!sim_edges.empty()) sp.init_graph = read_edge_list(sim_edges);
      ovm::RunOptions opt;
      opt.max_steps = sim_max_steps;
      std::ofstream trace;
      if (!sim_trace.empty()) {
        trace.open(sim_trace, std::ios::binary);
        if (!trace) ovm::fail(ovm::ErrorKind::IoError, "cannot write " + sim_trace);
        opt.trace = &trace;
      }
      const auto out = ovm::run_to_absorption(sp, sim_seed, opt);
      std::cout << outcome_json(out).dump(2) << '\n';
    } else if (*sweep) {
      auto config = ovm::load_config(sweep_config);
      if (sweep_workers) config.workers = *sweep_workers;
      if (!sweep_out.empty()) config.output_dir = sweep_out;
      const auto res = ovm::run_sweep(config);
      for (const auto& a : res.aggregates) {
        std::printf("q=%s N=%zu K=%u runs=%zu failed=%zu segregation=%zu disconnected=%zu connected=%zu\n",
                    brief(a.q).c_str(), a.n, a.k, a.replicates, a.failed, a.segregation, a.disconnected_consensus,
                    a.connected_consensus);
      }
      std::printf("%zu runs, %zu worker(s), %.2fs\n", res.records.size(), res.workers, res.wall_seconds);
    } else if (*figs) {
      for (int which : fig_which) {
        std::cout << ovm::figure_datasets(fig_from, which, fig_out.empty() ? fig_from : fig_out).string() << '\n';
      }
    } else if (*check) {
      if (suite == "invariants") {
        check_invariants();
      } else if (suite == "coupling") {
        check_coupling(eq_runs);
      } else if (suite == "oracle") {
        check_oracle();
      } else if (suite == "lemma64") {
        check_lemma64();
      } else {
        if (regimes.empty()) regimes = {"thm32", "thm34", "prop45"};
        for (const auto& name : regimes) {
          const auto kind = ovm::regime_from_string(name);
          auto params = ovm::default_regime_params(kind);
          if (!ladder.empty()) params.n_ladder = ladder;
          if (check_reps) params.replicates = *check_reps;
          params.workers = check_workers;
          check_regime(kind, params);
        }
      }
    } else if (*beta) {
      const auto b = ovm::beta(beta_x, beta_tol);
      std::printf("%s\nterms=%zu\n", num(b.value).c_str(), b.terms_used);
    } else if (*oracle) {
      const auto curve = ovm::srw_exit_survival(or_n, or_start, or_horizon);
      std::printf("t,survival,absorbed\n");
      for (std::size_t t = 0; t < curve.probabilities.size(); t += std::max<std::size_t>(or_every, 1)) {
        std::printf("%zu,%s,%s\n", t, num(curve.probabilities[t]).c_str(), num(curve.absorbed[t]).c_str());
      }
    } else if (*bounds) {
      std::printf("theorem31_bound=%s\n", num(ovm::theorem31_bound(b_q, b_c, b_cp)).c_str());
      std::printf("prop33_bound=%s\n", num(ovm::prop33_bound(b_q, b_eps)).c_str());
      if (b_n != 0) {
        std::printf("n1=%s\n", num(ovm::n1_threshold(b_n, b_eps, b_q)).c_str());
        std::printf("n2=%s\n", num(ovm::n2_threshold(b_n, b_kappa, b_eps, b_q)).c_str());
        std::printf("deletion_bound=%s\n", num(ovm::deletion_bound_probability({b_n, b_q, 1.1})).c_str());
      }
    } else if (*aud) {
      const auto res = ovm::deletion_graph_audit(ap, a_kappa, a_eps, a_runs, a_seed);
      ovm::write_audit_csv(std::cout, res);
      std::fprintf(stderr, "pass_rate=%s\n", num(res.pass_rate).c_str());
    }
  } catch (const CheckFailed&) {
    return kAssertionFailed;
  } catch (const ovm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "invariant violated: %s\n", e.what());
    return kAssertionFailed;
  }
  return kOk;
}

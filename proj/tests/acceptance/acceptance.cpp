// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// if any hard criterion fails. Tolerances are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ovm/asymptotics.hpp"
#include "ovm/csv.hpp"
#include "ovm/delayed.hpp"
#include "ovm/dynamics.hpp"
#include "ovm/error.hpp"
#include "ovm/experiments.hpp"
#include "ovm/regimes.hpp"
#include "ovm/stats.hpp"

namespace fs = std::filesystem;

namespace {

// Oracle vs series.
constexpr double kSeriesTol = 0.01;
constexpr std::size_t kSeriesWidth = 200;
// Degenerate regimes.
constexpr std::size_t kDegenerateN = 64;
constexpr std::size_t kDegenerateRuns = 100;
// Lower-bound sweep.
constexpr std::size_t kSweepN = 512;
constexpr std::size_t kSweepReplicates = 500;
constexpr double kHalfWidths = 3.0;
// Closeness to the beta limit at q = 0.3.
constexpr double kBetaCloseness = 0.07;
// Absorption time concentration.
constexpr double kTauRelTol = 0.10;
// Inverse-sqrt regime.
constexpr double kMinorityLevel = 0.25;
constexpr double kMinorityFloor = 0.85;
// One-minus-power regime.
constexpr std::size_t kDenseN = 1024;
constexpr double kDenseFloor = 0.95;
// Coupling.
constexpr std::size_t kCouplingN = 64;
constexpr std::size_t kCouplingRuns = 100;
// Jump chain.
constexpr std::size_t kJumpN = 6;
constexpr std::size_t kJumpRuns = 50000;
constexpr double kJumpTv = 0.02;
constexpr double kJumpP = 0.001;
// Deletion-count bound.
constexpr double kDeletionFloor = 0.999;
constexpr std::size_t kDeletionMcTrials = 10000;
constexpr double kDeletionMcSe = 3.0;
// Deletion-graph audit.
constexpr std::size_t kAuditN = 256;
constexpr std::size_t kAuditRuns = 100;
constexpr double kAuditFloor = 0.95;
// Three opinions.
constexpr std::size_t kTernaryN = 513;
constexpr std::size_t kTernaryReplicates = 300;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  bool soft = false;
  std::function<Verdict()> check;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Suite {
 public:
  Suite(fs::path workdir, std::size_t workers) : workdir_(std::move(workdir)), workers_(workers) {}

  ovm::ExperimentConfig base(const std::string& name) const {
    ovm::ExperimentConfig c;
    c.name = name;
    c.workers = workers_;
    c.output_dir = workdir_ / name;
    return c;
  }

  ovm::ExperimentConfig lower_bound_config() const {
    auto c = base("lower_bound");
    for (int i = 1; i <= 9; ++i) c.q_grid.push_back(i / 10.0);
    c.n_grid = {kSweepN};
    c.replicates = kSweepReplicates;
    c.base_seed = 31;
    return c;
  }

  ovm::ExperimentConfig degenerate_config(const std::string& name, std::size_t workers) const {
    auto c = base(name);
    c.q_grid = {0.0, 1.0};
    c.n_grid = {kDegenerateN};
    c.replicates = kDegenerateRuns;
    c.base_seed = 1;
    c.workers = workers;
    return c;
  }

  ovm::ExperimentConfig ternary_config(unsigned k, const std::string& name, std::size_t workers) const {
    auto c = base(name);
    c.k = k;
    c.q_grid = {0.3};
    c.n_grid = {kTernaryN};
    c.replicates = kTernaryReplicates;
    c.base_seed = 42;
    c.workers = workers;
    return c;
  }

  // The lower-bound sweep feeds three criteria; run it once.
  const ovm::SweepResult& lower_bound() {
    if (!lower_bound_) lower_bound_ = ovm::run_sweep(lower_bound_config());
    return *lower_bound_;
  }

  const ovm::SweepResult& ternary(unsigned k) {
    auto& slot = k == 2 ? binary_ : ternary_;
    if (!slot) slot = ovm::run_sweep(ternary_config(k, k == 2 ? "two_opinions" : "three_opinions", workers_));
    return *slot;
  }

  const fs::path& workdir() const { return workdir_; }
  std::size_t workers() const { return workers_; }

 private:
  fs::path workdir_;
  std::size_t workers_;
  std::optional<ovm::SweepResult> lower_bound_, binary_, ternary_;
};

const ovm::AggregateStats& point_at(const ovm::SweepResult& s, double q) {
  for (const auto& a : s.aggregates)
    if (std::abs(a.q - q) < 1e-12) return a;
  ovm::fail(ovm::ErrorKind::BadParams, "grid point missing");
}

Verdict series_vs_oracle() {
  const double xs[] = {0.05, 0.1, 0.2, 0.5, 1.0};
  const auto curve = ovm::srw_exit_survival(kSeriesWidth, kSeriesWidth / 2, kSeriesWidth * kSeriesWidth);
  double worst = 0.0;
  for (double x : xs) worst = std::max(worst, std::abs(curve.at_scaled_time(x) - ovm::beta(x).value));
  return {worst <= kSeriesTol, "max |DP - beta| = " + fmt("%.3e", worst) + " (tol " + fmt("%g", kSeriesTol) + ")"};
}

Verdict degenerate(Suite& suite) {
  const auto res = ovm::run_sweep(suite.degenerate_config("degenerate", suite.workers()));
  std::size_t bad = 0;
  const auto initial = ovm::balanced_counts(kDegenerateN, 2);
  for (const auto& r : res.records) {
    if (r.status != ovm::RunStatus::Ok) {
      ++bad;
    } else if (r.q == 0.0) {
      bad += r.outcome.outcome_class != ovm::OutcomeClass::Segregation || r.outcome.final_counts != initial;
    } else {
      bad += r.outcome.outcome_class != ovm::OutcomeClass::ConnectedConsensus;
    }
  }
  return {bad == 0, std::to_string(res.records.size()) + " runs, " + std::to_string(bad) + " off-pattern"};
}

Verdict lower_bound(Suite& suite) {
  suite.lower_bound();
  const fs::path dir = suite.workdir() / "lower_bound";
  for (int which = 1; which <= 4; ++which) ovm::figure_datasets(dir, which, dir / "figures");
  const auto fig1 = ovm::read_csv(dir / "figures" / "fig1.csv");
  const std::size_t cq = fig1.column("q"), cp = fig1.column("p_hat"), clo = fig1.column("ci_lo"),
                    chi = fig1.column("ci_hi"), cb = fig1.column("beta_bound");
  bool ok = fig1.rows.size() == 9;
  double worst = INFINITY;
  std::string detail;
  for (const auto& row : fig1.rows) {
    const double p = std::stod(row[cp]), hw = (std::stod(row[chi]) - std::stod(row[clo])) / 2.0;
    const double margin = p - (std::stod(row[cb]) - kHalfWidths * hw);
    worst = std::min(worst, margin);
    ok = ok && margin >= 0.0;
    detail += " q=" + fmt("%g", std::stod(row[cq])) + ":" + fmt("%.3f", p) + "/" + fmt("%.3f", std::stod(row[cb]));
  }
  return {ok, "p_hat/bound" + detail + "; min margin " + fmt("%.3f", worst)};
}

Verdict beta_closeness(Suite& suite) {
  const auto& a = point_at(suite.lower_bound(), 0.3);
  const double p = a.probability(a.segregation), b = ovm::beta(0.3 / (2 * 0.7)).value;
  return {std::abs(p - b) <= kBetaCloseness,
          "p_hat " + fmt("%.4f", p) + " vs beta " + fmt("%.4f", b) + ", |diff| " + fmt("%.4f", std::abs(p - b)) +
              " (tol " + fmt("%g", kBetaCloseness) + ")"};
}

Verdict tau_concentration(Suite& suite) {
  const auto& a = point_at(suite.lower_bound(), 0.3);
  const double ref = static_cast<double>(ovm::pair_count(kSweepN)) / 0.7;
  if (!a.median_tau_abs_segregation) return {false, "no segregation runs"};
  const double med = *a.median_tau_abs_segregation;
  return {std::abs(med - ref) <= kTauRelTol * ref,
          "median " + fmt("%.0f", med) + " vs " + fmt("%.0f", ref) + ", rel " + fmt("%.4f", std::abs(med - ref) / ref)};
}

Verdict inverse_sqrt(Suite& suite) {
  auto p = ovm::default_regime_params(ovm::RegimeKind::Thm32);
  p.c_prime = kMinorityLevel;
  p.workers = suite.workers();
  const auto r = ovm::regime_check(ovm::RegimeKind::Thm32, p);
  std::string detail;
  for (const auto& pt : r.points)
    detail += " N=" + std::to_string(pt.n) + ":" + fmt("%.3f", pt.p_hat) + "(pred " + fmt("%.2f", pt.prediction.value_or(NAN)) + ")";
  const double last = r.points.back().p_hat;
  return {r.monotone_non_decreasing && r.points.back().n == 1024 && last >= kMinorityFloor,
          "P(Zmin > N/4)" + detail + (r.monotone_non_decreasing ? ", monotone" : ", NOT monotone")};
}

Verdict one_minus_power(Suite& suite) {
  auto p = ovm::default_regime_params(ovm::RegimeKind::Thm34);
  p.n_ladder = {kDenseN};
  p.workers = suite.workers();
  const auto r = ovm::regime_check(ovm::RegimeKind::Thm34, p);
  const auto& pt = r.points.front();
  return {pt.p_hat >= kDenseFloor, "N=1024 q=" + fmt("%.5f", pt.q) + " P(connected consensus, min degree >= 512) = " +
                                       fmt("%.3f", pt.p_hat) + " [" + fmt("%.3f", pt.ci.lower) + ", " +
                                       fmt("%.3f", pt.ci.upper) + "]"};
}

Verdict coupling() {
  ovm::ModelParams p;
  p.n = kCouplingN;
  p.q = 0.5;
  std::size_t violations = 0;
  std::uint64_t steps = 0;
  for (std::size_t r = 0; r < kCouplingRuns; ++r) {
    const auto run = ovm::run_delayed(p, ovm::substream_seed(64, r), std::nullopt, true);
    violations += run.report.first_violation.has_value();
    steps += run.report.global_steps;
  }
  return {violations == 0, std::to_string(kCouplingRuns) + " runs, " + std::to_string(steps) + " steps, " +
                               std::to_string(violations) + " violating runs"};
}

Verdict jump_chain() {
  const auto rep = ovm::jump_chain_equivalence(kJumpN, 0.5, kJumpRuns, 2);
  return {rep.total_variation <= kJumpTv && rep.p_value >= kJumpP,
          "TV " + fmt("%.4f", rep.total_variation) + ", chi2 " + fmt("%.2f", rep.chi_square) + " on " +
              std::to_string(rep.degrees_of_freedom) + " df, p " + fmt("%.4f", rep.p_value) + ", " +
              std::to_string(rep.categories) + " cells"};
}

Verdict deletion_bound() {
  const double exact = ovm::deletion_bound_probability({512, 0.3, 1.1});
  const ovm::DeletionBoundParams small{128, 0.3, 1.1};
  const double p128 = ovm::deletion_bound_probability(small);
  const auto mc = ovm::negative_binomial_tail_monte_carlo(small.k(), small.q, small.threshold(), kDeletionMcTrials, 3);
  const double se = std::sqrt(p128 * (1.0 - p128) / static_cast<double>(kDeletionMcTrials));
  const double diff = std::abs(mc.estimate - p128);
  return {exact >= kDeletionFloor && diff <= kDeletionMcSe * se,
          "P(N=512) = " + fmt("%.9f", exact) + "; N=128 exact " + fmt("%.9f", p128) + " vs MC " +
              fmt("%.6f", mc.estimate) + " (|diff| " + fmt("%.2e", diff) + ", 3 SE " + fmt("%.2e", 3 * se) + ")"};
}

Verdict audit(Suite& suite) {
  ovm::ModelParams p;
  p.n = kAuditN;
  p.q = 0.5;
  const auto res = ovm::deletion_graph_audit(p, 0.5, 0.2, kAuditRuns, 66);
  std::ofstream csv(suite.workdir() / "audit.csv", std::ios::binary);
  ovm::write_audit_csv(csv, res);
  return {res.pass_rate >= kAuditFloor,
          "pass rate " + fmt("%.2f", res.pass_rate) + " over " + std::to_string(kAuditRuns) + " runs, n2 = " +
              fmt("%.1f", res.rows.front().n2)};
}

Verdict ordering(Suite& suite) {
  const auto& two = suite.ternary(2).aggregates.front();
  const auto& three = suite.ternary(3).aggregates.front();
  ovm::figure_datasets(suite.workdir() / "three_opinions", 4, suite.workdir() / "three_opinions" / "figures");
  const double p2 = two.probability(two.segregation), p3 = three.probability(three.segregation);
  return {p3 >= p2, "P(seg|K=3) " + fmt("%.3f", p3) + " vs P(seg|K=2) " + fmt("%.3f", p2) +
                        "; disconnected consensus K=2: " + std::to_string(two.disconnected_consensus) +
                        ", K=3: " + std::to_string(three.disconnected_consensus) + " of " +
                        std::to_string(kTernaryReplicates)};
}

Verdict determinism(Suite& suite) {
  std::vector<std::pair<fs::path, fs::path>> pairs;
  const std::size_t other = suite.workers() == 1 ? 3 : 1;
  ovm::run_sweep(suite.degenerate_config("degenerate_rerun", other));
  pairs.emplace_back(suite.workdir() / "degenerate", suite.workdir() / "degenerate_rerun");
  suite.ternary(3);
  ovm::run_sweep(suite.ternary_config(3, "three_opinions_rerun", other));
  pairs.emplace_back(suite.workdir() / "three_opinions", suite.workdir() / "three_opinions_rerun");
  std::size_t identical = 0, compared = 0;
  for (const auto& [a, b] : pairs) {
    for (const char* f : {"runs.csv", "aggregate.csv"}) {
      ++compared;
      const std::string x = slurp(a / f);
      identical += !x.empty() && x == slurp(b / f);
    }
  }
  return {identical == compared, std::to_string(identical) + "/" + std::to_string(compared) +
                                     " files byte-identical (rerun with worker count " + std::to_string(other) + ")"};
}

void report_three_opinion_floor(Suite& suite) {
  auto p = ovm::default_regime_params(ovm::RegimeKind::Prop45);
  p.workers = suite.workers();
  const auto r = ovm::regime_check(ovm::RegimeKind::Prop45, p);
  const auto& pt = r.points.front();
  std::printf("REPORT  three-opinion small-q minority floor: N=%zu q=%.2f P(Zmin > 0.1 N) = %.3f [%.3f, %.3f]\n",
              pt.n, pt.q, pt.p_hat, pt.ci.lower, pt.ci.upper);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance gate"};
  fs::path workdir = "acceptance_work";
  std::size_t workers = 0;
  std::vector<std::string> only;
  bool reports = true;
  app.add_option("--workdir", workdir, "directory for sweep outputs");
  app.add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
  app.add_option("--only", only, "run only these criterion ids");
  app.add_flag("!--no-reports", reports, "skip report-only lines");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workdir);
  Suite suite(workdir, workers);

  const std::vector<Criterion> criteria = {
      {"series-oracle", "series matches exact exit-time DP", false, [] { return series_vs_oracle(); }},
      {"degenerate", "q=0 always segregates, q=1 always connected consensus", false, [&] { return degenerate(suite); }},
      {"lower-bound", "segregation frequency respects the asymptotic lower bound", false,
       [&] { return lower_bound(suite); }},
      {"beta-closeness", "segregation frequency near the beta limit at q=0.3", true,
       [&] { return beta_closeness(suite); }},
      {"tau-concentration", "segregation absorption time near C(N,2)/(1-q)", false,
       [&] { return tau_concentration(suite); }},
      {"inverse-sqrt", "minority stays above N/4 when q = N^-1/2", false, [&] { return inverse_sqrt(suite); }},
      {"one-minus-power", "dense connected consensus when 1-q = N^-1/2", false, [&] { return one_minus_power(suite); }},
      {"coupling", "deletion graph stays inside the delayed model graph", false, [] { return coupling(); }},
      {"jump-chain", "delayed jump chain matches the direct chain in law", false, [] { return jump_chain(); }},
      {"deletion-bound", "negative-binomial deletion-count bound", false, [] { return deletion_bound(); }},
      {"deletion-audit", "deletion graph connected with min degree >= N/2 up to n2", false,
       [&] { return audit(suite); }},
      {"three-opinions", "three opinions segregate at least as often as two", false, [&] { return ordering(suite); }},
      {"determinism", "sweeps rerun to byte-identical CSV", false, [&] { return determinism(suite); }},
  };

  std::size_t hard_failures = 0, soft_failures = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-18s %s%s | %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
                c.soft ? " (soft)" : "", v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++(c.soft ? soft_failures : hard_failures);
  }
  if (reports && only.empty()) report_three_opinion_floor(suite);
  std::printf("%zu criteria, %zu hard failures, %zu soft failures\n", ran, hard_failures, soft_failures);
  return hard_failures == 0 ? 0 : 1;
}

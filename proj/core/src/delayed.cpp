#include "ovm/delayed.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>

#include <boost/math/distributions/chi_squared.hpp>

#include "ovm/csv.hpp"
#include "ovm/error.hpp"

namespace ovm {

DelayedState::DelayedState(SimState model) : model_(std::move(model)), deletion_graph_(model_.graph()) {}

DelayedState DelayedState::init(const ModelParams& params) { return DelayedState(SimState::init(params)); }

DelayedEvent DelayedState::step(Rng& rng) {
  const std::size_t n = model_.n();
  const auto x = static_cast<Vertex>(rng.below(n));
  auto y = static_cast<Vertex>(rng.below(n - 1));
  if (y >= x) ++y;
  DelayedEvent ev;
  ev.pair = x < y ? EdgeKey{x, y} : EdgeKey{y, x};
  ev.u = rng.bernoulli(model_.q());
  ev.discordant = model_.discordant().contains(ev.pair);
  ++global_step_;
  if (!ev.u) {
    if (deletion_graph_.has_edge(ev.pair)) {
      deletion_graph_.remove_edge(ev.pair);
      ev.removed_from_deletion_graph = true;
    }
    if (ev.discordant) {
      model_.apply_deletion(ev.pair);
      ev.x_e = true;
    }
  } else if (ev.discordant) {
    ev.x_e = ev.x_op = true;
    model_.apply_update(ev.pair, rng.bernoulli(0.5) ? ev.pair.a : ev.pair.b);
  }
  x_e_count_ += ev.x_e;
  x_op_count_ += ev.x_op;
  return ev;
}

bool DelayedState::subgraph_holds() const {
  for (Vertex x = 0; x < deletion_graph_.vertex_count(); ++x) {
    for (Vertex y : deletion_graph_.neighbors(x)) {
      if (!model_.graph().has_edge(x, y)) return false;
    }
  }
  return true;
}

std::uint64_t default_step_budget(std::size_t n, double q) {
  const double dn = static_cast<double>(n);
  const double slack = std::max(1.0 - q, 1.0 / std::max(dn, 1.0));
  return static_cast<std::uint64_t>(std::ceil(50.0 * dn * dn / slack));
}

DelayedRun run_delayed(const ModelParams& params, std::uint64_t seed, std::optional<std::uint64_t> step_budget,
                       bool full_check_every_step) {
  if (params.n < 2) fail(ErrorKind::BadParams, "the delayed chain needs at least two vertices");
  const std::uint64_t budget = step_budget.value_or(default_step_budget(params.n, params.q));
  if (budget == 0) fail(ErrorKind::BadParams, "step budget must be positive");
  DelayedState state = DelayedState::init(params);
  Rng rng(seed);
  DelayedRun run;
  if (!state.subgraph_holds()) run.report.first_violation = 0;
  while (!state.model().absorbed()) {
    if (state.global_step() >= budget) {
      fail(ErrorKind::BudgetExceeded, "delayed chain did not absorb within " + std::to_string(budget) + " steps");
    }
    const DelayedEvent ev = state.step(rng);
    bool violated = false;
    if (ev.x_e && !ev.x_op) violated = state.deletion_graph().has_edge(ev.pair);
    if (full_check_every_step) violated = violated || !state.subgraph_holds();
    if (violated && !run.report.first_violation) run.report.first_violation = state.global_step();
  }
  if (!state.subgraph_holds() && !run.report.first_violation) run.report.first_violation = state.global_step();
  run.outcome = summarize(state.model(), params.eps, seed);
  run.report.global_steps = state.global_step();
  run.report.x_op_count = state.x_op_count();
  run.report.x_e_count = state.x_e_count();
  run.report.deletion_graph_edges = state.deletion_graph().edge_count();
  return run;
}

EquivalenceReport jump_chain_equivalence(std::size_t n, double q, std::size_t runs, std::uint64_t seed) {
  ModelParams params;
  params.n = n;
  params.q = q;
  params.validate();
  using Key = std::tuple<int, std::vector<std::size_t>, std::size_t>;
  std::map<Key, std::pair<std::size_t, std::size_t>> table;
  auto key_of = [](const RunOutcome& o) {
    return Key{static_cast<int>(o.outcome_class), o.final_counts, o.edges_remaining};
  };
  for (std::size_t i = 0; i < runs; ++i) {
    ++table[key_of(run_to_absorption(params, substream_seed(seed, 2 * i)))].first;
    ++table[key_of(run_delayed(params, substream_seed(seed, 2 * i + 1)).outcome)].second;
  }

  EquivalenceReport report;
  report.runs = runs;
  report.categories = table.size();
  if (runs == 0) return report;
  double tv = 0.0;
  for (const auto& [key, cell] : table) {
    tv += std::abs(static_cast<double>(cell.first) - static_cast<double>(cell.second));
  }
  report.total_variation = tv / (2.0 * static_cast<double>(runs));

  // Equal sample sizes: each cell contributes (a - b)^2 / (a + b).
  std::vector<std::pair<double, double>> cells;
  std::pair<double, double> pooled{0.0, 0.0};
  for (const auto& [key, cell] : table) {
    if (cell.first + cell.second < 10) {
      pooled.first += static_cast<double>(cell.first);
      pooled.second += static_cast<double>(cell.second);
    } else {
      cells.emplace_back(static_cast<double>(cell.first), static_cast<double>(cell.second));
    }
  }
  if (pooled.first + pooled.second > 0) cells.push_back(pooled);
  for (const auto& [a, b] : cells) report.chi_square += (a - b) * (a - b) / (a + b);
  report.degrees_of_freedom = cells.size() > 1 ? cells.size() - 1 : 0;
  if (report.degrees_of_freedom > 0) {
    const boost::math::chi_squared dist(static_cast<double>(report.degrees_of_freedom));
    report.p_value = boost::math::cdf(boost::math::complement(dist, report.chi_square));
  }
  return report;
}

namespace {

void check_threshold_inputs(std::size_t n, double eps, double q) {
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::BadParams, "q must lie in [0, 1]");
  if (q == 1.0) fail(ErrorKind::DivergentThreshold, "thresholds diverge when q = 1");
  if (!(eps > 0.0)) fail(ErrorKind::BadParams, "eps must be positive");
  if (n < 3) fail(ErrorKind::BadParams, "thresholds need N >= 3");
}

}  // namespace

double n1_threshold(std::size_t n, double eps, double q) {
  check_threshold_inputs(n, eps, q);
  const double log_n = std::log(static_cast<double>(n));
  const double gap = log_n - std::log((1.0 + eps) * log_n);
  if (!(gap > 0.0)) fail(ErrorKind::BadParams, "log N must exceed log((1+eps) log N)");
  return static_cast<double>(pair_count(n)) * gap / (2.0 * (1.0 - q));
}

double n2_threshold(std::size_t n, double kappa, double eps, double q) {
  check_threshold_inputs(n, eps, q);
  if (!(kappa > 0.0 && kappa < 1.0)) fail(ErrorKind::BadParams, "kappa must lie in (0, 1)");
  if (!(kappa + eps < 1.0)) fail(ErrorKind::BadParams, "kappa + eps must be below 1");
  return static_cast<double>(pair_count(n)) * std::log(1.0 / (kappa + eps)) / (2.0 * (1.0 - q));
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), Vertex{0}); }
  Vertex find(Vertex x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<Vertex> parent;
};

// Connectivity is only ever lost, so the step that disconnected the graph is
// found offline: re-insert deleted edges newest first until one component is
// left; that edge's deletion was the disconnecting step.
std::uint64_t disconnection_step(const DynamicGraph& final_graph,
                                 const std::vector<std::pair<EdgeKey, std::uint64_t>>& deletions) {
  const std::size_t n = final_graph.vertex_count();
  DisjointSets sets(n);
  std::size_t components = n;
  for (const EdgeKey& e : final_graph.edges()) components -= sets.unite(e.a, e.b);
  for (auto it = deletions.rbegin(); it != deletions.rend(); ++it) {
    components -= sets.unite(it->first.a, it->first.b);
    if (components == 1) return it->second;
  }
  return 0;
}

}  // namespace

AuditResult deletion_graph_audit(const ModelParams& params, double kappa, double eps, std::size_t runs,
                                 std::uint64_t seed) {
  params.validate();
  if (!params.complete_graph()) fail(ErrorKind::BadParams, "the deletion-graph audit requires a complete initial graph");
  if (params.n < 3) fail(ErrorKind::BadParams, "the audit needs N >= 3");
  const double n2 = n2_threshold(params.n, kappa, eps, params.q);
  const auto horizon = static_cast<std::uint64_t>(std::floor(n2));
  const double min_degree = kappa * static_cast<double>(params.n);

  AuditResult result;
  std::size_t passed = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    DelayedState state = DelayedState::init(params);
    Rng rng(substream_seed(seed, r));
    AuditRow row{params.n, params.q, kappa, eps, n2, false, std::nullopt};
    if (static_cast<double>(state.deletion_graph().min_degree()) < min_degree) row.first_violation_step = 0;
    std::vector<std::pair<EdgeKey, std::uint64_t>> deletions;
    while (state.global_step() < horizon && !state.model().absorbed()) {
      const DelayedEvent ev = state.step(rng);
      if (!ev.removed_from_deletion_graph) continue;
      deletions.emplace_back(ev.pair, state.global_step());
      const auto& g = state.deletion_graph();
      if (!row.first_violation_step &&
          static_cast<double>(std::min(g.degree(ev.pair.a), g.degree(ev.pair.b))) < min_degree) {
        row.first_violation_step = state.global_step();
      }
    }
    if (!state.deletion_graph().is_connected()) {
      const std::uint64_t step = disconnection_step(state.deletion_graph(), deletions);
      row.first_violation_step = std::min(row.first_violation_step.value_or(step), step);
    }
    row.pass = !row.first_violation_step.has_value();
    passed += row.pass;
    result.rows.push_back(row);
  }
  result.pass_rate = runs == 0 ? 0.0 : static_cast<double>(passed) / static_cast<double>(runs);
  return result;
}

void write_audit_csv(std::ostream& out, const AuditResult& result) {
  out << kAuditHeader << '\n';
  for (const AuditRow& row : result.rows) {
    out << row.n << ',' << format_double(row.q) << ',' << format_double(row.kappa) << ',' << format_double(row.eps)
        << ',' << format_double(row.n2) << ',' << (row.pass ? 1 : 0) << ',';
    if (row.first_violation_step) out << *row.first_violation_step;
    out << '\n';
  }
}

}  // namespace ovm

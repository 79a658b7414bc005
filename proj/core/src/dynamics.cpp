#include "ovm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ovm/error.hpp"

namespace ovm {

namespace {

inline EdgeKey canonical(Vertex x, Vertex y) { return x < y ? EdgeKey{x, y} : EdgeKey{y, x}; }

void require(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("state invariant violated: ") + what);
}

}  // namespace

std::vector<std::size_t> balanced_counts(std::size_t n, unsigned k) {
  if (k == 2) return {n / 2, n - n / 2};
  std::vector<std::size_t> counts(k, k == 0 ? 0 : n / k);
  for (std::size_t i = 0; k != 0 && i < n % k; ++i) ++counts[i];
  return counts;
}

void ModelParams::validate() const {
  if (n < 1 || n > kMaxVertices) fail(ErrorKind::BadParams, "population must lie in [1, " + std::to_string(kMaxVertices) + "]");
  if (k < 2 || k > 65535) fail(ErrorKind::BadParams, "number of opinions must be at least 2");
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::BadParams, "voting probability must lie in [0, 1]");
  if (!(eps > 0.0 && eps < 0.5)) fail(ErrorKind::BadParams, "eps must lie in (0, 1/2)");
  if (const auto* counts = std::get_if<std::vector<std::size_t>>(&init_opinions)) {
    if (counts->size() != k) fail(ErrorKind::BadCounts, "expected one initial count per opinion");
    if (std::accumulate(counts->begin(), counts->end(), std::size_t{0}) != n) {
      fail(ErrorKind::BadCounts, "initial counts do not sum to the population size");
    }
  }
  if (const auto* edges = std::get_if<std::vector<EdgeKey>>(&init_graph)) {
    for (const EdgeKey& e : *edges) {
      if (e.a >= n || e.b >= n || e.a == e.b) {
        fail(ErrorKind::BadEdge, "edge {" + std::to_string(e.a + 1) + "," + std::to_string(e.b + 1) +
                                     "} invalid for population " + std::to_string(n));
      }
    }
  }
}

std::vector<std::size_t> ModelParams::initial_counts() const {
  if (const auto* counts = std::get_if<std::vector<std::size_t>>(&init_opinions)) return *counts;
  return balanced_counts(n, k);
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::UpdateToFirst: return "UpdateToFirst";
    case EventKind::UpdateToSecond: return "UpdateToSecond";
    case EventKind::Deletion: return "Deletion";
  }
  return "?";
}

std::string_view to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::Segregation: return "Segregation";
    case OutcomeClass::DisconnectedConsensus: return "DisconnectedConsensus";
    case OutcomeClass::ConnectedConsensus: return "ConnectedConsensus";
  }
  return "?";
}

OutcomeClass outcome_from_string(std::string_view s) {
  if (s == "Segregation") return OutcomeClass::Segregation;
  if (s == "DisconnectedConsensus") return OutcomeClass::DisconnectedConsensus;
  if (s == "ConnectedConsensus") return OutcomeClass::ConnectedConsensus;
  fail(ErrorKind::SchemaMismatch, "unknown outcome class '" + std::string(s) + "'");
}

SimState::SimState(DynamicGraph graph, std::vector<Opinion> opinions, unsigned k, double q)
    : graph_(std::move(graph)),
      opinions_(std::move(opinions)),
      discordant_(graph_.vertex_count()),
      counts_(k, 0),
      k_(k),
      q_(q),
      initial_edges_(graph_.edge_count()) {
  if (opinions_.size() != graph_.vertex_count()) fail(ErrorKind::BadCounts, "one opinion per vertex required");
  for (Opinion o : opinions_) {
    if (o >= k_) fail(ErrorKind::BadCounts, "opinion label out of range");
    ++counts_[o];
  }
  for (Vertex x = 0; x < graph_.vertex_count(); ++x) {
    for (Vertex y : graph_.neighbors(x)) {
      if (x < y && opinions_[x] != opinions_[y]) discordant_.insert({x, y});
    }
  }
}

SimState SimState::init(const ModelParams& params) {
  params.validate();
  std::vector<Opinion> opinions;
  opinions.reserve(params.n);
  const auto counts = params.initial_counts();
  for (unsigned label = 0; label < params.k; ++label) opinions.insert(opinions.end(), counts[label], static_cast<Opinion>(label));

  DynamicGraph graph = std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, CompleteGraph>) {
          return DynamicGraph::complete(params.n);
        } else {
          return DynamicGraph::from_edges(params.n, spec);
        }
      },
      params.init_graph);
  return SimState(std::move(graph), std::move(opinions), params.k, params.q);
}

StepEvent SimState::step(Rng& rng) {
  if (discordant_.empty()) fail(ErrorKind::Absorbed, "no discordant edge remains");
  const EdgeKey e = discordant_.sample(rng);
  if (!rng.bernoulli(q_)) {
    apply_deletion(e);
    return {EventKind::Deletion, e};
  }
  if (rng.bernoulli(0.5)) {
    apply_update(e, e.a);
    return {EventKind::UpdateToFirst, e};
  }
  apply_update(e, e.b);
  return {EventKind::UpdateToSecond, e};
}

void SimState::apply_deletion(EdgeKey e) {
  graph_.remove_edge(e);
  discordant_.erase(e);
  ++deletions_;
}

void SimState::apply_update(EdgeKey e, Vertex source) {
  const Vertex target = source == e.a ? e.b : e.a;
  set_opinion(target, opinions_[source]);
  ++updates_;
}

void SimState::set_opinion(Vertex v, Opinion o) {
  const Opinion old = opinions_[v];
  if (old == o) return;
  opinions_[v] = o;
  --counts_[old];
  ++counts_[o];
  for (Vertex y : graph_.neighbors(v)) {
    const Opinion oy = opinions_[y];
    if (oy == old) {
      discordant_.insert(canonical(v, y));
    } else if (oy == o) {
      discordant_.erase(canonical(v, y));
    }
  }
}

std::size_t SimState::z_min() const { return *std::min_element(counts_.begin(), counts_.end()); }

std::size_t SimState::surviving_opinions() const {
  return static_cast<std::size_t>(std::count_if(counts_.begin(), counts_.end(), [](std::size_t c) { return c > 0; }));
}

void SimState::verify() const {
  require(graph_.consistent(), "graph adjacency symmetry / edge count");
  require(discordant_.consistent(), "discordant set index");
  std::size_t expected = 0;
  for (Vertex x = 0; x < n(); ++x) {
    for (Vertex y : graph_.neighbors(x)) {
      if (x < y && opinions_[x] != opinions_[y]) {
        ++expected;
        require(discordant_.contains({x, y}), "discordant edge missing from set");
      }
    }
  }
  require(expected == discordant_.size(), "discordant set holds a concordant or absent edge");
  std::vector<std::size_t> recount(k_, 0);
  for (Opinion o : opinions_) ++recount[o];
  require(recount == counts_, "opinion counts");
  require(deletions_ == initial_edges_ - graph_.edge_count(), "deletions equal lost edges");
  if (k_ == 2) {
    const std::size_t zmin = z_min();
    const std::size_t dmin = graph_.min_degree();
    if (dmin >= zmin) require(discordant_.size() >= zmin * (dmin - zmin), "discordance lower bound");
  }
}

Classification classify_outcome(const SimState& state, double eps) {
  if (!state.absorbed()) fail(ErrorKind::NotAbsorbed, std::to_string(state.discordant().size()) + " discordant edges remain");
  Classification c{};
  c.component_sizes = state.graph().component_sizes();
  const std::size_t n = state.n();
  const bool connected = c.component_sizes.size() <= 1;
  const std::size_t surviving = state.surviving_opinions();
  if (connected && surviving > 1) throw std::logic_error("absorbed connected graph holds several opinions");
  if (surviving > 1) {
    c.outcome = OutcomeClass::Segregation;
  } else {
    c.outcome = connected ? OutcomeClass::ConnectedConsensus : OutcomeClass::DisconnectedConsensus;
  }
  c.strong_segregation = c.outcome == OutcomeClass::Segregation && surviving == state.k();
  const auto counts = state.counts();
  const std::size_t minority = n - *std::max_element(counts.begin(), counts.end());
  const std::size_t largest = c.component_sizes.empty() ? 0 : c.component_sizes.front();
  const double dn = static_cast<double>(n);
  c.eps_consensus = static_cast<double>(minority) <= eps * dn && static_cast<double>(largest) >= (1.0 - eps) * dn;
  return c;
}

RunOutcome summarize(const SimState& state, double eps, std::uint64_t seed) {
  Classification c = classify_outcome(state, eps);
  RunOutcome out;
  out.outcome_class = c.outcome;
  out.eps_consensus = c.eps_consensus;
  out.strong_segregation = c.strong_segregation;
  out.tau_abs = state.steps();
  out.final_counts.assign(state.counts().begin(), state.counts().end());
  out.z_min_final = state.z_min();
  out.component_sizes = std::move(c.component_sizes);
  out.edges_remaining = state.graph().edge_count();
  out.min_degree_final = state.graph().min_degree();
  out.s_op_final = state.updates();
  out.s_del_final = state.deletions();
  out.seed = seed;
  return out;
}

void write_trace_line(std::ostream& out, const SimState& state, const StepEvent& event) {
  out << state.steps() << ',' << to_string(event.kind) << ',' << event.edge.a + 1 << ',' << event.edge.b + 1 << ',';
  const auto counts = state.counts();
  for (std::size_t i = 0; i < counts.size(); ++i) out << (i ? ";" : "") << counts[i];
  out << ',' << state.discordant().size() << '\n';
}

RunOutcome run_to_absorption(const ModelParams& params, std::uint64_t seed, const RunOptions& options) {
  SimState state = SimState::init(params);
  Rng rng(seed);
  if (options.trace) *options.trace << kTraceHeader << '\n';
  while (!state.absorbed()) {
    if (options.max_steps != 0 && state.steps() >= options.max_steps) {
      fail(ErrorKind::BudgetExceeded, "no absorption within " + std::to_string(options.max_steps) + " steps");
    }
    const StepEvent event = state.step(rng);
    if (options.trace) write_trace_line(*options.trace, state, event);
    if (options.verify_every != 0 && state.steps() % options.verify_every == 0) state.verify();
  }
  if (options.verify_every != 0) state.verify();
  return summarize(state, params.eps, seed);
}

WalkCheck opinion_walk_check(const ModelParams& params, std::size_t runs, std::uint64_t seed) {
  if (params.k != 2) fail(ErrorKind::BadParams, "the walk check applies to two opinions");
  WalkCheck check;
  std::vector<signed char> signs;
  for (std::size_t r = 0; r < runs; ++r) {
    SimState state = SimState::init(params);
    Rng rng(substream_seed(seed, r));
    while (!state.absorbed()) {
      const std::size_t before = state.counts()[1];
      const StepEvent event = state.step(rng);
      const std::size_t after = state.counts()[1];
      if (event.kind == EventKind::Deletion) {
        if (after != before) throw std::logic_error("opinion count moved on a deletion");
        continue;
      }
      if (after == before + 1) {
        signs.push_back(1);
      } else if (after + 1 == before) {
        signs.push_back(-1);
      } else {
        throw std::logic_error("opinion count did not move by one on an update");
      }
    }
  }
  check.updates = signs.size();
  if (signs.empty()) return check;
  check.up_moves = static_cast<std::uint64_t>(std::count(signs.begin(), signs.end(), 1));
  const double n = static_cast<double>(check.updates);
  check.up_fraction = static_cast<double>(check.up_moves) / n;
  check.frequency_z = (static_cast<double>(check.up_moves) - n / 2.0) / std::sqrt(n / 4.0);

  check.sign_runs = 1;
  for (std::size_t i = 1; i < signs.size(); ++i) check.sign_runs += signs[i] != signs[i - 1];
  const double up = static_cast<double>(check.up_moves);
  const double down = n - up;
  if (up > 0 && down > 0 && n > 1) {
    const double mean = 2.0 * up * down / n + 1.0;
    const double var = 2.0 * up * down * (2.0 * up * down - n) / (n * n * (n - 1.0));
    if (var > 0) {
      check.runs_z = (static_cast<double>(check.sign_runs) - mean) / std::sqrt(var);
      check.runs_p = std::erfc(std::abs(check.runs_z) / std::sqrt(2.0));
    }
  }
  check.pass = std::abs(check.frequency_z) <= 4.0 && check.runs_p >= 0.001;
  return check;
}

}  // namespace ovm

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "ovm/graph.hpp"
#include "ovm/rng.hpp"

namespace ovm {

/// Opinion labels are 0..K-1. With K = 2, label 1 is the opinion whose count
/// is the walk Z and label 0 is its counter-opinion.
using Opinion = std::uint16_t;

struct Balanced {};
struct CompleteGraph {};

/// Balanced, or explicit per-opinion counts (length K, summing to N).
using OpinionInit = std::variant<Balanced, std::vector<std::size_t>>;
/// Complete graph, or an explicit edge list on 0-based vertices.
using GraphInit = std::variant<CompleteGraph, std::vector<EdgeKey>>;

struct ModelParams {
  std::size_t n = 0;
  unsigned k = 2;
  double q = 0.5;
  double eps = 0.1;
  OpinionInit init_opinions = Balanced{};
  GraphInit init_graph = CompleteGraph{};

  /// Throws BadParams, BadCounts or BadEdge.
  void validate() const;
  std::vector<std::size_t> initial_counts() const;
  bool complete_graph() const { return std::holds_alternative<CompleteGraph>(init_graph); }
};

/// For K = 2, label 1 holds floor(N/2) and label 2 the rest. For K >= 3,
/// floor(N/K) per opinion with the remainder going to the lowest labels.
std::vector<std::size_t> balanced_counts(std::size_t n, unsigned k);

enum class EventKind { UpdateToFirst, UpdateToSecond, Deletion };
std::string_view to_string(EventKind kind);

/// UpdateToFirst: the second endpoint adopted the first endpoint's opinion
/// (both now hold what edge.a held). UpdateToSecond is the reverse.
struct StepEvent {
  EventKind kind;
  EdgeKey edge;
};

/// Mutable state of one run: graph, opinions, the discordant-edge set, and
/// the step counters. The discordant set is maintained incrementally: an
/// opinion change at x walks adj(x) once and toggles each incident edge.
class SimState {
 public:
  SimState(DynamicGraph graph, std::vector<Opinion> opinions, unsigned k, double q);

  /// Builds the initial state (block assignment of opinions by vertex index).
  static SimState init(const ModelParams& params);

  /// One transition: sample a discordant edge, then U ~ Ber(q), then
  /// V ~ Ber(1/2) if U = 1, all from `rng` in that order. Throws Absorbed.
  StepEvent step(Rng& rng);

  /// Deletes a discordant edge. Counted as a deletion step.
  void apply_deletion(EdgeKey e);
  /// The endpoint of `e` other than `source` adopts the opinion of `source`.
  /// `e` must be discordant. Counted as an update step.
  void apply_update(EdgeKey e, Vertex source);

  bool absorbed() const { return discordant_.empty(); }

  const DynamicGraph& graph() const { return graph_; }
  const IndexedEdgeSet& discordant() const { return discordant_; }
  std::span<const Opinion> opinions() const { return opinions_; }
  Opinion opinion(Vertex v) const { return opinions_[v]; }
  std::span<const std::size_t> counts() const { return counts_; }

  std::size_t n() const { return opinions_.size(); }
  unsigned k() const { return k_; }
  double q() const { return q_; }

  std::uint64_t steps() const { return updates_ + deletions_; }
  std::uint64_t updates() const { return updates_; }
  std::uint64_t deletions() const { return deletions_; }
  std::size_t initial_edges() const { return initial_edges_; }

  /// min over opinions of the count; for K = 2 this is min(Z, N - Z).
  std::size_t z_min() const;
  std::size_t surviving_opinions() const;

  /// Full O(N^2) audit of every state invariant; throws std::logic_error.
  void verify() const;

 private:
  void set_opinion(Vertex v, Opinion o);

  DynamicGraph graph_;
  std::vector<Opinion> opinions_;
  IndexedEdgeSet discordant_;
  std::vector<std::size_t> counts_;
  unsigned k_;
  double q_;
  std::uint64_t updates_ = 0;
  std::uint64_t deletions_ = 0;
  std::size_t initial_edges_ = 0;
};

enum class OutcomeClass { Segregation, DisconnectedConsensus, ConnectedConsensus };
std::string_view to_string(OutcomeClass c);
OutcomeClass outcome_from_string(std::string_view s);

struct Classification {
  OutcomeClass outcome;
  bool eps_consensus;
  /// Every one of the K opinions survives (only meaningful on segregation).
  bool strong_segregation;
  std::vector<std::size_t> component_sizes;
};

/// Throws NotAbsorbed while discordant edges remain. For K >= 3 consensus
/// means a single surviving opinion; eps-consensus measures the minority as
/// N minus the largest opinion count.
Classification classify_outcome(const SimState& state, double eps);

struct RunOutcome {
  OutcomeClass outcome_class = OutcomeClass::ConnectedConsensus;
  bool eps_consensus = false;
  bool strong_segregation = false;
  std::uint64_t tau_abs = 0;
  std::vector<std::size_t> final_counts;
  std::size_t z_min_final = 0;
  std::vector<std::size_t> component_sizes;
  std::size_t edges_remaining = 0;
  std::size_t min_degree_final = 0;
  std::uint64_t s_op_final = 0;
  std::uint64_t s_del_final = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const RunOutcome&, const RunOutcome&) = default;
};

/// Classifies an absorbed state and gathers the outcome record.
RunOutcome summarize(const SimState& state, double eps, std::uint64_t seed);

struct RunOptions {
  /// Line-delimited per-step trace; nullptr disables tracing.
  std::ostream* trace = nullptr;
  /// 0 means no limit. Exceeding a positive budget throws BudgetExceeded.
  std::uint64_t max_steps = 0;
  /// Run SimState::verify every this many steps (0 = never).
  std::uint64_t verify_every = 0;
};

/// Deterministic in (params, seed).
RunOutcome run_to_absorption(const ModelParams& params, std::uint64_t seed, const RunOptions& options = {});

/// Header line written at the start of every trace.
inline constexpr std::string_view kTraceHeader = "n,kind,a,b,counts,discordant";
void write_trace_line(std::ostream& out, const SimState& state, const StepEvent& event);

/// Pooled check that, on update events, the K = 2 opinion count moves +1 or
/// -1 like a fair coin with independent signs.
struct WalkCheck {
  std::uint64_t updates = 0;
  std::uint64_t up_moves = 0;
  double up_fraction = 0.5;
  /// (up_moves - updates/2) / sqrt(updates/4)
  double frequency_z = 0.0;
  /// Wald-Wolfowitz runs test over the concatenated sign sequence.
  std::uint64_t sign_runs = 0;
  double runs_z = 0.0;
  double runs_p = 1.0;
  bool pass = true;
};

/// pass = |frequency_z| <= 4 and runs_p >= 0.001 (vacuous with no updates).
WalkCheck opinion_walk_check(const ModelParams& params, std::size_t runs, std::uint64_t seed);

}  // namespace ovm

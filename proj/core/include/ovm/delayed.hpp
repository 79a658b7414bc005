#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ovm/dynamics.hpp"
#include "ovm/graph.hpp"
#include "ovm/rng.hpp"

namespace ovm {

/// What one global step of the delayed chain did.
struct DelayedEvent {
  EdgeKey pair;
  bool u = false;           ///< voting coin
  bool discordant = false;  ///< pair was a discordant edge of the model
  bool x_e = false;         ///< the delayed model changed
  bool x_op = false;        ///< an opinion update took place
  bool removed_from_deletion_graph = false;
};

/// The delayed model (which samples any vertex pair and idles on
/// non-discordant ones) coupled with the dynamical deletion graph, which drops
/// every sampled pair whose voting coin failed. The deletion graph is a
/// subgraph of the model graph at all times.
class DelayedState {
 public:
  /// Both graphs start from the model's initial edge set.
  explicit DelayedState(SimState model);
  static DelayedState init(const ModelParams& params);

  /// Draw order: the pair (two vertex draws), then U, then V if an update
  /// happens.
  DelayedEvent step(Rng& rng);

  const SimState& model() const { return model_; }
  const DynamicGraph& deletion_graph() const { return deletion_graph_; }
  std::uint64_t global_step() const { return global_step_; }
  std::uint64_t x_op_count() const { return x_op_count_; }
  std::uint64_t x_e_count() const { return x_e_count_; }

  /// Full O(E) check that every deletion-graph edge is a model edge.
  bool subgraph_holds() const;

 private:
  SimState model_;
  DynamicGraph deletion_graph_;
  std::uint64_t global_step_ = 0;
  std::uint64_t x_op_count_ = 0;
  std::uint64_t x_e_count_ = 0;
};

struct CouplingReport {
  std::uint64_t global_steps = 0;
  std::uint64_t x_op_count = 0;
  std::uint64_t x_e_count = 0;
  std::size_t deletion_graph_edges = 0;
  /// First global step after which the subgraph relation failed, if ever.
  std::optional<std::uint64_t> first_violation;
};

struct DelayedRun {
  /// tau_abs, s_op_final and s_del_final count jump-chain moves (X^e = 1).
  RunOutcome outcome;
  CouplingReport report;
};

/// ceil(50 N^2 / (1 - q)), with 1 - q floored at 1/N so q = 1 stays finite.
std::uint64_t default_step_budget(std::size_t n, double q);

/// Runs the coupled system until the model absorbs. The subgraph relation is
/// checked after every step: incrementally (the only step that can break it is
/// one where the model loses an edge) and, with `full_check_every_step`, by a
/// full scan as well. Throws BudgetExceeded if `step_budget` global steps pass
/// without absorption.
DelayedRun run_delayed(const ModelParams& params, std::uint64_t seed, std::optional<std::uint64_t> step_budget = {},
                       bool full_check_every_step = false);

/// Distance between the absorbed-state laws of the direct and delayed chains.
struct EquivalenceReport {
  std::size_t runs = 0;
  std::size_t categories = 0;
  double total_variation = 0.0;
  double chi_square = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
};

/// Runs `runs` replicates of each model on the balanced complete graph and
/// compares the empirical joint law of (outcome class, final counts, edges
/// remaining) by total variation and a two-sample chi-square homogeneity test
/// (cells with a pooled count below 10 are merged).
EquivalenceReport jump_chain_equivalence(std::size_t n, double q, std::size_t runs, std::uint64_t seed);

/// Connectivity horizon C(N,2) (log N - log((1+eps) log N)) / (2 (1-q)).
/// Throws DivergentThreshold for q = 1, BadParams on invalid inputs.
double n1_threshold(std::size_t n, double eps, double q);
/// Minimum-degree horizon C(N,2) log(1/(kappa+eps)) / (2 (1-q)).
double n2_threshold(std::size_t n, double kappa, double eps, double q);

struct AuditRow {
  std::size_t n = 0;
  double q = 0.0;
  double kappa = 0.0;
  double eps = 0.0;
  double n2 = 0.0;
  bool pass = false;
  /// First global step at which the deletion graph had a vertex of degree
  /// below kappa*N or was disconnected.
  std::optional<std::uint64_t> first_violation_step;
};

struct AuditResult {
  std::vector<AuditRow> rows;
  double pass_rate = 0.0;
};

/// Simulates the coupled system for min(floor(n2), absorption) global steps
/// per run and records whether the deletion graph stayed connected with
/// minimum degree >= kappa*N throughout. Requires a complete initial graph.
AuditResult deletion_graph_audit(const ModelParams& params, double kappa, double eps, std::size_t runs,
                                 std::uint64_t seed);

inline constexpr const char* kAuditHeader = "N,q,kappa,eps,n2,pass,first_violation_step";
void write_audit_csv(std::ostream& out, const AuditResult& result);

}  // namespace ovm

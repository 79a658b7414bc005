#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ovm/dynamics.hpp"
#include "ovm/stats.hpp"

namespace ovm {

/// How q depends on N when a sweep does not use a fixed q grid.
enum class QScheduleKind { Constant, InverseSqrt, OneMinusPower };

struct QSchedule {
  QScheduleKind kind = QScheduleKind::Constant;
  double delta = 0.5;  ///< exponent for OneMinusPower: 1 - q_N = N^-delta

  /// N^-1/2 for InverseSqrt, 1 - N^-delta for OneMinusPower.
  double q_for(std::size_t n) const;
};

/// Sweep description. Mirrors the JSON config document field for field.
struct ExperimentConfig {
  std::string name = "sweep";
  std::vector<double> q_grid;
  std::vector<std::size_t> n_grid;
  unsigned k = 2;
  std::size_t replicates = 1;
  std::uint64_t base_seed = 0;
  double eps = 0.1;
  QSchedule q_schedule;
  OpinionInit init_opinions = Balanced{};
  GraphInit init_graph = CompleteGraph{};
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t workers = 0;
  std::filesystem::path output_dir;
  /// Per-run step budget, 0 for none; exceeding it records a failed row.
  std::uint64_t max_steps = 0;

  /// Throws ConfigError.
  void validate() const;
  /// Number of q points: the grid size, or 1 under an N-dependent schedule.
  std::size_t q_points() const;
  double q_at(std::size_t q_index, std::size_t n_index) const;
  ModelParams params(std::size_t q_index, std::size_t n_index) const;
};

/// Throws ConfigError on malformed documents.
ExperimentConfig parse_config(std::string_view json_text);
/// Throws IoError if the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

/// splitmix64(splitmix64(splitmix64(splitmix64(base) ^ q) ^ n) ^ replicate).
/// Each stage is a bijection, so fixing all but the last index never
/// collides. Part of the reproducibility contract: do not change.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t q_index, std::uint64_t n_index,
                          std::uint64_t replicate_index);

enum class RunStatus { Ok, BudgetExceeded };

struct RunRecord {
  std::size_t q_index = 0;
  std::size_t n_index = 0;
  std::size_t replicate = 0;
  double q = 0.0;
  std::size_t n = 0;
  unsigned k = 2;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Ok;
  RunOutcome outcome;
  /// Written to the manifest only.
  double wall_seconds = 0.0;
};

struct AggregateStats {
  std::size_t q_index = 0;
  std::size_t n_index = 0;
  double q = 0.0;
  std::size_t n = 0;
  unsigned k = 2;
  std::size_t replicates = 0;
  std::size_t failed = 0;
  std::size_t segregation = 0;
  std::size_t disconnected_consensus = 0;
  std::size_t connected_consensus = 0;
  std::size_t eps_consensus = 0;
  std::size_t strong_segregation = 0;
  std::optional<double> mean_tau_abs;
  std::optional<double> median_tau_abs;
  std::optional<double> mean_tau_abs_segregation;
  std::optional<double> median_tau_abs_segregation;
  std::optional<double> mean_edges_remaining_segregation;
  std::optional<double> mean_edges_remaining_disconnected_consensus;
  std::optional<double> mean_edges_remaining_connected_consensus;
  std::optional<double> mean_c1_segregation;
  std::optional<double> mean_c2_segregation;
  std::optional<double> mean_components_segregation;

  std::size_t completed() const { return replicates - failed; }
  /// Empirical probability over completed runs (0 when none completed).
  double probability(std::size_t count) const;
  /// 95% Wilson interval over completed runs.
  Interval interval(std::size_t count) const;
};

/// Groups sorted records per (q_index, n_index).
std::vector<AggregateStats> aggregate(const std::vector<RunRecord>& records);

struct SweepResult {
  std::vector<RunRecord> records;  ///< sorted by (q_index, n_index, replicate)
  std::vector<AggregateStats> aggregates;
  double wall_seconds = 0.0;
  std::size_t workers = 1;
};

/// Runs every replicate of every grid point on a worker pool. Results are
/// independent of the worker count. When config.output_dir is set, writes
/// runs.csv, aggregate.csv and manifest.json there (IoError on failure).
SweepResult run_sweep(const ExperimentConfig& config);

std::vector<std::string> runs_header();
std::vector<std::string> aggregate_header();
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateStats>& stats);

/// Writes fig<which>.csv (which in 1..4) into out_dir from a sweep directory
/// holding runs.csv and aggregate.csv. Returns the written path. Throws
/// SchemaMismatch if the inputs do not carry the pinned headers.
std::filesystem::path figure_datasets(const std::filesystem::path& sweep_dir, int which,
                                      const std::filesystem::path& out_dir);

std::vector<std::string> figure_header(int which, unsigned k);

}  // namespace ovm

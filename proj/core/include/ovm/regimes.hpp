#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ovm/stats.hpp"

namespace ovm {

/// thm32: q_N = N^-1/2, statistic P(Z_min > c' N).
/// thm34: 1 - q_N = N^-delta, statistic P(connected consensus and min degree >= kappa N).
/// prop45: K >= 3 at a small fixed q, statistic P(Z_min > level N).
enum class RegimeKind { Thm32, Thm34, Prop45 };

std::string_view to_string(RegimeKind kind);
/// Throws ConfigError for unknown names.
RegimeKind regime_from_string(std::string_view name);

struct RegimeParams {
  std::vector<std::size_t> n_ladder;
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  double c_prime = 0.25;  ///< thm32
  double delta = 0.5;     ///< thm34 schedule exponent
  double kappa = 0.5;     ///< thm34
  unsigned k = 3;         ///< prop45
  double q = 0.05;        ///< prop45
  double level = 0.1;     ///< prop45
};

/// Ladders and replicate counts used by the acceptance suite.
RegimeParams default_regime_params(RegimeKind kind);

struct RegimePoint {
  std::size_t n = 0;
  double q = 0.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  Interval ci;
  /// Finite-N heuristic for thm32: theorem31_bound(q_N, 1/2, c').
  std::optional<double> prediction;
};

struct RegimeReport {
  RegimeKind kind = RegimeKind::Thm32;
  std::vector<RegimePoint> points;
  /// p_hat non-decreasing along the ladder.
  bool monotone_non_decreasing = true;
};

/// Throws ConfigError on invalid parameters.
RegimeReport regime_check(RegimeKind kind, const RegimeParams& params);

}  // namespace ovm

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ovm {

inline constexpr double kDefaultSeriesTolerance = 1e-12;

/// Limit law of the exit time of a centred simple symmetric walk from an
/// interval of width N, on the N^2 time scale:
///
///   beta(x) = (4/pi) sum_{j>=0} (-1)^j / (2j+1) exp(-(pi^2/2) (2j+1)^2 x).
///
/// The (2j+1)^2 exponent is the classical first-exit expansion; it is what
/// the exact lattice computation in srw_exit_survival converges to.
struct BetaEval {
  double x = 0.0;
  double tol = kDefaultSeriesTolerance;
  double value = 1.0;
  std::size_t terms_used = 0;
};

/// Sums until the next term's magnitude drops below tol; beta(0) = 1 exactly.
/// Throws BadTolerance if tol <= 0 and BadParams if x < 0 or not finite.
BetaEval beta(double x, double tol = kDefaultSeriesTolerance);

/// probabilities[n] = P(tau > n) for the simple symmetric walk started at
/// `start` and absorbed at {0, n}; absorbed[n] is the mass already absorbed,
/// so the two add to one at every n.
struct SurvivalCurve {
  std::size_t n = 0;
  std::size_t start = 0;
  std::vector<double> probabilities;
  std::vector<double> absorbed;

  /// P(tau > floor(x n^2)).
  double at_scaled_time(double x) const;
};

/// Exact dynamic programming over the absorbed transition kernel. Only sites
/// of the walk's current parity are touched. Throws BadParams unless
/// 2 <= n, 0 < start < n and horizon >= 1.
SurvivalCurve srw_exit_survival(std::size_t n, std::size_t start, std::size_t horizon);

struct OffcenterComparison {
  std::size_t n = 0;
  std::size_t start = 0;
  std::uint64_t step = 0;  ///< floor(x n^2)
  double offcenter = 0.0;  ///< P(tau > step) from `start`
  double centered = 0.0;   ///< P(tau > step) from floor(n/2)
  bool dominated = false;  ///< offcenter <= centered + 1e-12
};

/// A walk started away from the centre leaves the interval no later, in
/// distribution, than the centred one; checked exactly at one time point.
OffcenterComparison offcenter_survival(std::size_t n, std::size_t start, double x);

/// Inputs of the deletion-count bound: after k_N opinion updates, at least
/// N^2/2 deletions have happened with high probability.
struct DeletionBoundParams {
  std::size_t n = 0;
  double q = 0.0;
  double r = 1.1;

  /// max(q, 1/N)
  double alpha() const;
  /// ceil(r alpha / (1 - q) * N^2 / 2)
  std::uint64_t k() const;
  /// N^2 / 2
  double threshold() const;
  /// Throws BadR if r <= 1 and BadParams unless 0 < q < 1 and N >= 1.
  void validate() const;
};

/// Successes at or below this use the exact incomplete-beta CDF; above it the
/// normal approximation with continuity correction.
inline constexpr std::uint64_t kExactNegativeBinomialCutoff = 1'000'000;

/// P(X >= threshold) for X ~ NegativeBinomial(successes, q), the number of
/// failures before the successes-th success.
double negative_binomial_tail(std::uint64_t successes, double q, double threshold);

/// P(X >= N^2/2) with X ~ NB(k_N, q).
double deletion_bound_probability(const DeletionBoundParams& params);

struct MonteCarloEstimate {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double estimate = 0.0;
};

/// Direct simulation of Bernoulli(q) trials: counts failures until
/// `successes` successes and scores X >= threshold.
MonteCarloEstimate negative_binomial_tail_monte_carlo(std::uint64_t successes, double q, double threshold,
                                                      std::size_t trials, std::uint64_t seed);

/// beta( q/(2(1-q)) / (4 (c - c')^2) ): asymptotic lower bound on
/// P(Z_min > c' N) for initial minority >= cN. c' = 0, c = 1/2 bounds the
/// segregation probability. Throws BadParams unless 0 < q < 1 and
/// 0 <= c' < c <= 1/2.
double theorem31_bound(double q, double c, double c_prime);

/// 1 - beta( q/(1-q) eps (1-eps) ): asymptotic lower bound on the
/// eps-consensus probability from the complete graph.
double prop33_bound(double q, double eps);

/// Segregation bound used for figure overlays: theorem31_bound(q, 1/2, 0)
/// on (0, 1), extended by its limits 1 at q = 0 and 0 at q = 1.
double segregation_bound(double q);

}  // namespace ovm

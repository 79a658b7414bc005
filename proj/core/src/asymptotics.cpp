#include "ovm/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/negative_binomial.hpp>

#include "ovm/error.hpp"
#include "ovm/rng.hpp"

namespace ovm {

BetaEval beta(double x, double tol) {
  if (!(tol > 0.0)) fail(ErrorKind::BadTolerance, "series tolerance must be positive");
  if (!(x >= 0.0) || !std::isfinite(x)) fail(ErrorKind::BadParams, "beta is defined for finite x >= 0");
  BetaEval eval{x, tol, 1.0, 0};
  if (x == 0.0) return eval;

  using std::numbers::pi;
  const double rate = pi * pi / 2.0 * x;
  auto term = [&](std::size_t j) {
    const double odd = static_cast<double>(2 * j + 1);
    return 4.0 / pi / odd * std::exp(-rate * odd * odd);
  };
  double sum = 0.0;
  std::size_t j = 0;
  double magnitude = term(0);
  while (true) {
    sum += (j % 2 == 0) ? magnitude : -magnitude;
    ++j;
    magnitude = term(j);
    if (magnitude < tol) break;
  }
  eval.terms_used = j;
  eval.value = std::clamp(sum, 0.0, 1.0);
  return eval;
}

double SurvivalCurve::at_scaled_time(double x) const {
  const double nn = static_cast<double>(n);
  const auto step = static_cast<std::size_t>(std::floor(x * nn * nn));
  if (step >= probabilities.size()) fail(ErrorKind::BadParams, "scaled time beyond the computed horizon");
  return probabilities[step];
}

SurvivalCurve srw_exit_survival(std::size_t n, std::size_t start, std::size_t horizon) {
  if (n < 2 || start == 0 || start >= n) fail(ErrorKind::BadParams, "need 2 <= N and 0 < start < N");
  if (horizon < 1) fail(ErrorKind::BadParams, "horizon must be at least 1");
  SurvivalCurve curve;
  curve.n = n;
  curve.start = start;
  curve.probabilities.resize(horizon + 1);
  curve.absorbed.resize(horizon + 1);
  curve.probabilities[0] = 1.0;
  curve.absorbed[0] = 0.0;

  // mass[i] for i in [0, n]; the boundary cells stay zero. Only one parity
  // class is occupied at a time, so cells of the other class are always zero.
  std::vector<double> mass(n + 1, 0.0), next(n + 1, 0.0);
  mass[start] = 1.0;
  double absorbed = 0.0;
  std::size_t parity = start % 2;  // sites occupied at the current step
  for (std::size_t step = 1; step <= horizon; ++step) {
    absorbed += 0.5 * (mass[1] + mass[n - 1]);
    const std::size_t target_parity = parity ^ 1;
    double interior = 0.0;
    const std::size_t first = target_parity == 0 ? 2 : 1;
    for (std::size_t i = first; i < n; i += 2) {
      const double v = 0.5 * (mass[i - 1] + mass[i + 1]);
      next[i] = v;
      interior += v;
    }
    mass.swap(next);
    parity = target_parity;
    curve.probabilities[step] = interior;
    curve.absorbed[step] = absorbed;
  }
  return curve;
}

OffcenterComparison offcenter_survival(std::size_t n, std::size_t start, double x) {
  if (!(x >= 0.0)) fail(ErrorKind::BadParams, "x must be non-negative");
  const double nn = static_cast<double>(n);
  const auto step = static_cast<std::size_t>(std::floor(x * nn * nn));
  const std::size_t horizon = std::max<std::size_t>(step, 1);
  const SurvivalCurve off = srw_exit_survival(n, start, horizon);
  const SurvivalCurve mid = srw_exit_survival(n, n / 2, horizon);
  OffcenterComparison cmp;
  cmp.n = n;
  cmp.start = start;
  cmp.step = step;
  cmp.offcenter = off.probabilities[step];
  cmp.centered = mid.probabilities[step];
  cmp.dominated = cmp.offcenter <= cmp.centered + 1e-12;
  return cmp;
}

double DeletionBoundParams::alpha() const { return std::max(q, 1.0 / static_cast<double>(n)); }

std::uint64_t DeletionBoundParams::k() const {
  const double nn = static_cast<double>(n);
  return static_cast<std::uint64_t>(std::ceil(r * alpha() / (1.0 - q) * nn * nn / 2.0));
}

double DeletionBoundParams::threshold() const {
  const double nn = static_cast<double>(n);
  return nn * nn / 2.0;
}

void DeletionBoundParams::validate() const {
  if (!(r > 1.0)) fail(ErrorKind::BadR, "r must exceed 1");
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::BadParams, "q must lie in (0, 1)");
  if (n < 1) fail(ErrorKind::BadParams, "N must be positive");
}

double negative_binomial_tail(std::uint64_t successes, double q, double threshold) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::BadParams, "q must lie in (0, 1)");
  if (successes == 0) return threshold <= 0.0 ? 1.0 : 0.0;
  const double m = std::ceil(threshold);  // X is integer: X >= t  <=>  X >= ceil(t)
  if (m <= 0.0) return 1.0;
  const double k = static_cast<double>(successes);
  if (successes <= kExactNegativeBinomialCutoff) {
    const boost::math::negative_binomial_distribution<double> dist(k, q);
    return boost::math::cdf(boost::math::complement(dist, m - 1.0));
  }
  const double mean = k * (1.0 - q) / q;
  const double sd = std::sqrt(k * (1.0 - q)) / q;
  const double z = (m - 0.5 - mean) / sd;
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

double deletion_bound_probability(const DeletionBoundParams& params) {
  params.validate();
  return negative_binomial_tail(params.k(), params.q, params.threshold());
}

MonteCarloEstimate negative_binomial_tail_monte_carlo(std::uint64_t successes, double q, double threshold,
                                                      std::size_t trials, std::uint64_t seed) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::BadParams, "q must lie in (0, 1)");
  MonteCarloEstimate est;
  est.trials = trials;
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    std::uint64_t wins = 0;
    std::uint64_t failures = 0;
    while (wins < successes) {
      if (rng.bernoulli(q)) {
        ++wins;
      } else {
        ++failures;
      }
    }
    est.hits += static_cast<double>(failures) >= threshold;
  }
  est.estimate = trials == 0 ? 0.0 : static_cast<double>(est.hits) / static_cast<double>(trials);
  return est;
}

double theorem31_bound(double q, double c, double c_prime) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::BadParams, "q must lie in (0, 1)");
  if (!(c_prime >= 0.0 && c_prime < c && c <= 0.5)) fail(ErrorKind::BadParams, "need 0 <= c' < c <= 1/2");
  const double gap = c - c_prime;
  return beta(q / (2.0 * (1.0 - q)) / (4.0 * gap * gap)).value;
}

double prop33_bound(double q, double eps) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::BadParams, "q must lie in (0, 1)");
  if (!(eps > 0.0 && eps < 0.5)) fail(ErrorKind::BadParams, "eps must lie in (0, 1/2)");
  return 1.0 - beta(q / (1.0 - q) * eps * (1.0 - eps)).value;
}

double segregation_bound(double q) {
  if (q <= 0.0) return 1.0;
  if (q >= 1.0) return 0.0;
  return theorem31_bound(q, 0.5, 0.0);
}

}  // namespace ovm

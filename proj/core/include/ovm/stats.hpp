#pragma once

#include <cstddef>
#include <vector>

namespace ovm {

struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  double half_width() const { return (upper - lower) / 2.0; }
};

/// Wilson score interval for a binomial proportion, clamped to [0, 1].
/// Throws BadCounts unless 0 <= successes <= trials and trials >= 1; BadParams
/// unless z > 0.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

/// Middle value; mean of the two middle values for even sizes. Takes a copy.
double median(std::vector<double> values);
double mean(const std::vector<double>& values);

}  // namespace ovm

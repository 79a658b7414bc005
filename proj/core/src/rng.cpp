#include "ovm/rng.hpp"

namespace ovm {

namespace {

inline std::uint64_t mul_wide(std::uint64_t a, std::uint64_t b, std::uint64_t& low) {
  __extension__ const unsigned __int128 m = static_cast<unsigned __int128>(a) * b;
  low = static_cast<std::uint64_t>(m);
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) {
    next();
    return 0;
  }
  std::uint64_t low = 0;
  std::uint64_t high = mul_wide(next(), bound, low);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) high = mul_wide(next(), bound, low);
  }
  return high;
}

}  // namespace ovm

#include "edmlab/rng.hpp"

#include <cmath>
#include <numbers>

#include "edmlab/errors.hpp"

namespace edmlab {

SplitRng::SplitRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

std::uint64_t SplitRng::next_word() { return engine_(); }

double SplitRng::uniform01() {
  // Top 53 bits -> double in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SplitRng::uniform(double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("uniform: need lo < hi");
  return lo + (hi - lo) * uniform01();
}

double SplitRng::gaussian() {
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int SplitRng::categorical(const Eigen::VectorXd& probs) {
  if (probs.size() == 0) throw InvalidArgument("categorical: empty probability vector");
  const double u = uniform01();
  double cdf = 0.0;
  int last_positive = -1;
  for (int i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    if (p < 0.0) throw InvalidArgument("categorical: negative probability");
    if (p > 0.0) last_positive = i;
    cdf += p;
    if (u < cdf) return i;
  }
  if (last_positive < 0) throw InvalidArgument("categorical: all-zero probability vector");
  return last_positive;  // u landed in the rounding gap past the final entry
}

}  // namespace edmlab

#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace edmlab {

// Deterministic random stream with explicit substream selection.
//
// Distribution transforms are implemented here by hand (53-bit uniforms,
// Box-Muller gaussians, inverse-CDF categorical draws) because the standard
// library's distribution objects are implementation-defined: the same seed
// gives different numbers on different toolchains. Everything downstream of
// a (seed, stream) pair is bit-stable across platforms.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0);

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (cosine branch only, so draws never
  // depend on call interleaving).
  double gaussian();

  // Index i with probability probs[i] via inverse CDF. probs must be
  // entrywise >= 0 and sum to ~1; the last positive entry absorbs rounding.
  int categorical(const Eigen::VectorXd& probs);

  // Raw 64-bit word (exposed for hashing/substream derivation in tests).
  std::uint64_t next_word();

 private:
  std::mt19937_64 engine_;
};

}  // namespace edmlab

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "edmlab/ebm.hpp"

namespace edmlab::sampler {

// Smooth one-dimensional energy on a bounded interval [lo, hi]:
//   E(x) = -log sum_j weights[j] * exp(-(x - centers[j])^2 / (2 bandwidth^2)).
// A Gaussian-mixture shape: smooth, optionally multimodal, with an analytic
// gradient and a closed-form single-mode special case for validation.
struct SurrogateEnergy {
  Eigen::VectorXd centers;
  Eigen::VectorXd weights;  // entrywise > 0
  double bandwidth = 1.0;
  double lo = -1.0;
  double hi = 1.0;

  // Throws InvalidArgument if any invariant fails (no centers, sizes differ,
  // non-positive weights/bandwidth, lo >= hi).
  void validate() const;

  double energy(double x) const;
  double grad(double x) const;  // dE/dx
};

// A batch of draws plus the exact parameters that produced it.
struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
  int steps = 0;
  double step_size = 0.0;
};

// Exact draws from a discrete state model by inverse-CDF; deterministic for
// a given seed.
SampleBatch sample_categorical(const ebm::PseudoStateDist& p, int n, std::uint64_t seed);

// Unadjusted overdamped Langevin dynamics on exp(-E):
//   x <- x - step_size * E'(x) + sqrt(2 step_size) * xi,    xi ~ N(0, 1),
// run as n independent chains for `steps` iterations each, started uniformly
// in [lo, hi] and reflected at the boundary. No accept/reject correction is
// applied, so a small O(step_size) bias is expected and tested for, not
// removed. Chain i draws from substream (seed, i): results do not depend on
// execution order. Throws NonFiniteState if a chain produces NaN (step size
// too large for the energy's curvature).
SampleBatch langevin_sample(const SurrogateEnergy& e, int n, int steps, double step_size,
                            std::uint64_t seed);

// Ground truth for the sampler: bin masses of the normalized density
// exp(-E)/Z on [lo, hi], via composite trapezoid quadrature with at least
// 10^4 grid points overall (pts_per_bin subintervals in each bin). Sums to 1.
Eigen::VectorXd quadrature_density(const SurrogateEnergy& e, int bins, int pts_per_bin = 400);

// Normalized histogram of values over `bins` equal bins spanning [lo, hi].
Eigen::VectorXd histogram_density(const std::vector<double>& values, double lo, double hi,
                                  int bins);

}  // namespace edmlab::sampler

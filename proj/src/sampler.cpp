#include "edmlab/sampler.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "edmlab/errors.hpp"
#include "edmlab/numerics.hpp"
#include "edmlab/rng.hpp"

namespace edmlab::sampler {

void SurrogateEnergy::validate() const {
  if (centers.size() == 0) throw InvalidArgument("surrogate energy needs at least one center");
  if (weights.size() != centers.size())
    throw InvalidArgument("surrogate energy has " + std::to_string(centers.size()) +
                          " centers but " + std::to_string(weights.size()) + " weights");
  if (weights.minCoeff() <= 0.0) throw InvalidArgument("surrogate weights must be positive");
  if (!(bandwidth > 0.0)) throw InvalidArgument("bandwidth must be positive");
  if (!(lo < hi)) throw InvalidArgument("interval must satisfy lo < hi");
}

double SurrogateEnergy::energy(double x) const {
  // -logsumexp of per-center log terms, stable for far-from-center x.
  Eigen::VectorXd z(centers.size());
  for (int j = 0; j < centers.size(); ++j) {
    const double u = (x - centers(j)) / bandwidth;
    z(j) = std::log(weights(j)) - 0.5 * u * u;
  }
  return -logsumexp(z);
}

double SurrogateEnergy::grad(double x) const {
  // dE/dx = sum_j r_j (x - c_j) / b^2 with responsibilities
  // r_j proportional to w_j exp(-(x - c_j)^2 / (2 b^2)). Evaluated
  // allocation-free (this sits in the sampler's innermost loop) and shifted
  // by the smallest squared distance so the dominant term never underflows.
  const double inv_b2 = 1.0 / (bandwidth * bandwidth);
  double min_half_u2 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < centers.size(); ++j) {
    const double u = (x - centers(j)) / bandwidth;
    min_half_u2 = std::min(min_half_u2, 0.5 * u * u);
  }
  double denom = 0.0;
  double num = 0.0;
  for (int j = 0; j < centers.size(); ++j) {
    const double d = x - centers(j);
    const double u = d / bandwidth;
    const double term = weights(j) * std::exp(min_half_u2 - 0.5 * u * u);
    denom += term;
    num += term * d * inv_b2;
  }
  return num / denom;
}

SampleBatch sample_categorical(const ebm::PseudoStateDist& p, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("need at least one sample");
  SampleBatch batch;
  batch.seed = seed;
  batch.values.reserve(static_cast<std::size_t>(n));
  SplitRng rng(seed);
  for (int i = 0; i < n; ++i)
    batch.values.push_back(static_cast<double>(rng.categorical(p.probs)));
  return batch;
}

SampleBatch langevin_sample(const SurrogateEnergy& e, int n, int steps, double step_size,
                            std::uint64_t seed) {
  e.validate();
  if (n < 1) throw InvalidArgument("need at least one chain");
  if (steps < 1) throw InvalidArgument("need at least one step");
  if (!(step_size > 0.0)) throw InvalidArgument("step size must be positive");

  SampleBatch batch;
  batch.seed = seed;
  batch.steps = steps;
  batch.step_size = step_size;
  batch.values.resize(static_cast<std::size_t>(n));

  const double noise_scale = std::sqrt(2.0 * step_size);
  for (int i = 0; i < n; ++i) {
    SplitRng rng(seed, static_cast<std::uint64_t>(i));
    double x = rng.uniform(e.lo, e.hi);
    for (int t = 0; t < steps; ++t) {
      x += -step_size * e.grad(x) + noise_scale * rng.gaussian();
      if (std::isnan(x))
        throw NonFiniteState("chain " + std::to_string(i) + " at step " + std::to_string(t) +
                             "; reduce step_size");
      // Reflect at the boundary; repeat in case one move overshoots both walls.
      while (x < e.lo || x > e.hi) {
        if (x < e.lo) x = 2.0 * e.lo - x;
        if (x > e.hi) x = 2.0 * e.hi - x;
      }
    }
    batch.values[i] = x;
  }
  return batch;
}

Eigen::VectorXd quadrature_density(const SurrogateEnergy& e, int bins, int pts_per_bin) {
  e.validate();
  if (bins < 2) throw InvalidArgument("need at least two bins");
  // Keep the overall grid at >= 10^4 points regardless of bin count.
  const int per_bin = std::max(pts_per_bin, (10000 + bins - 1) / bins);

  const double width = (e.hi - e.lo) / bins;
  Eigen::VectorXd mass(bins);
  for (int b = 0; b < bins; ++b) {
    const double left = e.lo + b * width;
    const double h = width / per_bin;
    // Composite trapezoid over this bin.
    double acc = 0.5 * (std::exp(-e.energy(left)) + std::exp(-e.energy(left + width)));
    for (int i = 1; i < per_bin; ++i) acc += std::exp(-e.energy(left + i * h));
    mass(b) = acc * h;
  }
  const double total = mass.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw NonFiniteEvaluation("quadrature mass is not positive and finite");
  return mass / total;
}

Eigen::VectorXd histogram_density(const std::vector<double>& values, double lo, double hi,
                                  int bins) {
  if (bins < 1) throw InvalidArgument("need at least one bin");
  if (!(lo < hi)) throw InvalidArgument("interval must satisfy lo < hi");
  if (values.empty()) throw InvalidArgument("no values to bin");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    int b = static_cast<int>(std::floor((v - lo) / width));
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    counts(b) += 1.0;
  }
  return counts / counts.sum();
}

}  // namespace edmlab::sampler

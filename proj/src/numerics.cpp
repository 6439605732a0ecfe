#include "edmlab/numerics.hpp"

#include <cmath>

#include "edmlab/errors.hpp"

namespace edmlab {

double logsumexp(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw InvalidArgument("logsumexp of an empty vector");
  // allFinite, not isfinite(maxCoeff()): Eigen's maxCoeff skips NaN entries.
  if (!v.allFinite()) throw NonFiniteEvaluation("logsumexp over non-finite entries");
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  const double lse = logsumexp(v);
  return (v.array() - lse).exp();
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size())
    throw DimensionMismatch("tv_distance: " + std::to_string(p.size()) + " vs " +
                            std::to_string(q.size()));
  return 0.5 * (p - q).cwiseAbs().sum();
}

}  // namespace edmlab

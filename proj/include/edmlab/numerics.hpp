#pragma once

#include <Eigen/Dense>

namespace edmlab {

// log(sum_i exp(v[i])) with max-subtraction. This is the single shared
// primitive behind softmax probabilities, log-probabilities and energies,
// so they stay numerically consistent with each other.
double logsumexp(const Eigen::VectorXd& v);

// exp(v - logsumexp(v)); entries are positive and sum to 1 up to rounding.
Eigen::VectorXd softmax(const Eigen::VectorXd& v);

// Logistic function 1 / (1 + e^{-x}), evaluated without overflow.
double sigmoid(double x);

// Half the L1 distance between two equal-length vectors.
double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace edmlab

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "edmlab/mdp.hpp"

namespace edmlab::policies {

// Tabular softmax policy with an explicit per-state gauge.
//
// pi(a|s) = softmax_a(logits(s, a) + gauge(s)). Adding gauge(s) to every
// action score of state s cancels inside the softmax, so the gauge never
// changes action probabilities — but it does change the state-level
// energy model built on the same scores (see ebm.hpp). Keeping it as a
// separate field makes that distinction visible in data.
struct SoftmaxPolicy {
  Eigen::MatrixXd logits;  // (n_states, n_actions)
  Eigen::VectorXd gauge;   // (n_states), default zero

  SoftmaxPolicy() = default;
  explicit SoftmaxPolicy(Eigen::MatrixXd f)
      : logits(std::move(f)), gauge(Eigen::VectorXd::Zero(logits.rows())) {}
  SoftmaxPolicy(Eigen::MatrixXd f, Eigen::VectorXd g) : logits(std::move(f)), gauge(std::move(g)) {}

  int n_states() const { return static_cast<int>(logits.rows()); }
  int n_actions() const { return static_cast<int>(logits.cols()); }
};

// One-parameter family over two states and two actions: a single scalar
// theta steers both states through a fixed coupling constant k,
//   pi(a2|s1) = sigmoid(theta),  pi(a2|s2) = sigmoid(k * theta).
// Kept as its own type (not a constrained SoftmaxPolicy) because its
// gradients are taken with respect to the scalar theta, not the logit table.
struct CoupledPolicy {
  double theta = 0.0;
  double k = 1.0;
};

// Demonstration data: explicit (state, action) pairs, or a pre-aggregated
// empirical joint distribution over (s, a). Exactly one form is used at a time;
// weights take precedence when present.
struct DemoDataset {
  std::vector<std::pair<int, int>> pairs;
  std::optional<Eigen::MatrixXd> weights;  // (n_states, n_actions), sums to 1
};

// Distribution over actions in state s (max-subtracted softmax).
Eigen::VectorXd action_probs(const SoftmaxPolicy& p, int s);

// All rows at once: table(s, a) = pi(a|s). This is the representation the
// mdp module consumes.
Eigen::MatrixXd action_prob_table(const SoftmaxPolicy& p);

// log pi(a|s), computed as shifted-logit minus logsumexp (never as the log
// of an already-rounded softmax entry).
double log_prob(const SoftmaxPolicy& p, int s, int a);

// Gradient of log pi(a|s). The logit part is supported on row s:
//   d log pi(a|s) / d logits(s, a') = [a' == a] - pi(a'|s),
// zero on every other row. The gauge part is identically zero (the gauge
// cancels), returned explicitly so callers can assert that fact.
struct LogProbGrad {
  Eigen::MatrixXd logits;
  Eigen::VectorXd gauge;
};
LogProbGrad grad_log_prob(const SoftmaxPolicy& p, int s, int a);

// Materialize the coupled family as a 2x2 logit table
//   logits = [[0, theta], [0, k*theta]], gauge = 0.
SoftmaxPolicy coupled_to_softmax(const CoupledPolicy& c);

// d log pi(a|s) / d theta for the coupled family:
//   s1: [a == a2] - sigmoid(theta)
//   s2: k * ([a == a2] - sigmoid(k * theta))
double coupled_grad_log_prob(const CoupledPolicy& c, int s, int a);

// Normalized empirical joint over (s, a): count matrix from pairs, or the
// stored weights verbatim. Throws EmptyDataset when neither is available.
mdp::JointDist empirical_joint(const DemoDataset& d, int n_states, int n_actions);

}  // namespace edmlab::policies

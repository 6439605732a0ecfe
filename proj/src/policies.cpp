#include "edmlab/policies.hpp"

#include <cmath>
#include <string>

#include "edmlab/errors.hpp"
#include "edmlab/numerics.hpp"

namespace edmlab::policies {

namespace {

void check_state(const SoftmaxPolicy& p, int s) {
  if (s < 0 || s >= p.n_states())
    throw InvalidArgument("state index " + std::to_string(s) + " out of range");
  if (p.gauge.size() != p.n_states())
    throw BadShape("gauge length " + std::to_string(p.gauge.size()) + " for " +
                   std::to_string(p.n_states()) + " states");
}

void check_state_action(const SoftmaxPolicy& p, int s, int a) {
  check_state(p, s);
  if (a < 0 || a >= p.n_actions())
    throw InvalidArgument("action index " + std::to_string(a) + " out of range");
}

Eigen::VectorXd shifted_row(const SoftmaxPolicy& p, int s) {
  return p.logits.row(s).transpose().array() + p.gauge(s);
}

}  // namespace

Eigen::VectorXd action_probs(const SoftmaxPolicy& p, int s) {
  check_state(p, s);
  return softmax(shifted_row(p, s));
}

Eigen::MatrixXd action_prob_table(const SoftmaxPolicy& p) {
  Eigen::MatrixXd table(p.n_states(), p.n_actions());
  for (int s = 0; s < p.n_states(); ++s) table.row(s) = action_probs(p, s).transpose();
  return table;
}

double log_prob(const SoftmaxPolicy& p, int s, int a) {
  check_state_action(p, s, a);
  const Eigen::VectorXd row = shifted_row(p, s);
  return row(a) - logsumexp(row);
}

LogProbGrad grad_log_prob(const SoftmaxPolicy& p, int s, int a) {
  check_state_action(p, s, a);
  LogProbGrad g;
  g.logits = Eigen::MatrixXd::Zero(p.n_states(), p.n_actions());
  g.gauge = Eigen::VectorXd::Zero(p.n_states());
  const Eigen::VectorXd probs = action_probs(p, s);
  g.logits.row(s) = -probs.transpose();
  g.logits(s, a) += 1.0;
  return g;
}

SoftmaxPolicy coupled_to_softmax(const CoupledPolicy& c) {
  if (!std::isfinite(c.theta) || !std::isfinite(c.k))
    throw InvalidArgument("coupled policy parameters must be finite");
  Eigen::MatrixXd f(2, 2);
  f << 0.0, c.theta, 0.0, c.k * c.theta;
  return SoftmaxPolicy(std::move(f));
}

double coupled_grad_log_prob(const CoupledPolicy& c, int s, int a) {
  if (s < 0 || s > 1 || a < 0 || a > 1)
    throw InvalidArgument("coupled family has two states and two actions");
  const double indicator = (a == 1) ? 1.0 : 0.0;
  if (s == 0) return indicator - sigmoid(c.theta);
  return c.k * (indicator - sigmoid(c.k * c.theta));
}

mdp::JointDist empirical_joint(const DemoDataset& d, int n_states, int n_actions) {
  if (n_states <= 0 || n_actions <= 0) throw BadShape("need positive state/action counts");

  mdp::JointDist out;
  out.kind = mdp::DistKind::Exact;

  if (d.weights.has_value()) {
    const Eigen::MatrixXd& w = *d.weights;
    if (w.rows() != n_states || w.cols() != n_actions)
      throw DimensionMismatch("weight matrix is " + std::to_string(w.rows()) + "x" +
                              std::to_string(w.cols()));
    if (w.minCoeff() < 0.0 || std::abs(w.sum() - 1.0) > 1e-12)
      throw InvalidArgument("weights must be a probability matrix");
    out.probs = w;
    return out;
  }

  if (d.pairs.empty()) throw EmptyDataset();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n_states, n_actions);
  for (const auto& [s, a] : d.pairs) {
    if (s < 0 || s >= n_states || a < 0 || a >= n_actions)
      throw InvalidArgument("pair (" + std::to_string(s) + ", " + std::to_string(a) +
                            ") out of range");
    counts(s, a) += 1.0;
  }
  out.probs = counts / counts.sum();
  return out;
}

}  // namespace edmlab::policies

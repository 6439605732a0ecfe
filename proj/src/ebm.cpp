#include "edmlab/ebm.hpp"

#include <cmath>
#include <string>

#include "edmlab/errors.hpp"
#include "edmlab/numerics.hpp"

namespace edmlab::ebm {

namespace {

bool gauge_is_zero(const policies::SoftmaxPolicy& p) {
  return p.gauge.size() == p.logits.rows() &&
         (p.gauge.size() == 0 || p.gauge.cwiseAbs().maxCoeff() == 0.0);
}

void check_coupled_state(int s) {
  if (s != 0 && s != 1) throw InvalidArgument("coupled family has exactly two states");
}

// logsumexp over {ln 2, theta, k*theta} = log(2 + e^theta + e^{k theta}),
// shared by the coupled closed forms below.
double coupled_log_normalizer(const policies::CoupledPolicy& c) {
  Eigen::Vector3d entries(std::log(2.0), c.theta, c.k * c.theta);
  return logsumexp(entries);
}

}  // namespace

EnergyTable energy(const policies::SoftmaxPolicy& p) {
  EnergyTable table;
  table.values.resize(p.n_states());
  for (int s = 0; s < p.n_states(); ++s)
    table.values(s) = logsumexp(p.logits.row(s).transpose());
  return table;
}

PseudoStateDist pseudo_state_dist(const policies::SoftmaxPolicy& p) {
  if (!gauge_is_zero(p)) throw GaugeNotZero();
  PseudoStateDist out;
  out.probs = softmax(-energy(p).values);
  out.gauge_used = Eigen::VectorXd::Zero(p.n_states());
  return out;
}

PseudoStateDist pseudo_state_dist_gauged(const policies::SoftmaxPolicy& p) {
  if (p.gauge.size() != p.n_states())
    throw BadShape("gauge length " + std::to_string(p.gauge.size()) + " for " +
                   std::to_string(p.n_states()) + " states");
  // log weight of s is -gauge(s) - E(s); normalize in log space.
  PseudoStateDist out;
  out.probs = softmax(-(p.gauge + energy(p).values));
  out.gauge_used = p.gauge;
  return out;
}

mdp::JointDist joint_model(const policies::SoftmaxPolicy& p, const PseudoStateDist& d) {
  if (d.probs.size() != p.n_states())
    throw DimensionMismatch("state model has " + std::to_string(d.probs.size()) +
                            " states, policy has " + std::to_string(p.n_states()));
  mdp::JointDist out;
  out.kind = mdp::DistKind::Exact;
  out.probs = d.probs.asDiagonal() * policies::action_prob_table(p);
  return out;
}

Eigen::MatrixXd grad_log_pseudo(const policies::SoftmaxPolicy& p, int s) {
  if (!gauge_is_zero(p)) throw GaugeNotZero();
  if (s < 0 || s >= p.n_states())
    throw InvalidArgument("state index " + std::to_string(s) + " out of range");
  const Eigen::VectorXd probs = pseudo_state_dist(p).probs;
  Eigen::MatrixXd grad(p.n_states(), p.n_actions());
  for (int sp = 0; sp < p.n_states(); ++sp) {
    const Eigen::VectorXd pi_row = policies::action_probs(p, sp);
    grad.row(sp) = probs(sp) * pi_row.transpose();
    if (sp == s) grad.row(sp) -= pi_row.transpose();
  }
  return grad;
}

double coupled_log_pseudo(const policies::CoupledPolicy& c, int s) {
  check_coupled_state(s);
  const double score = (s == 0) ? c.theta : c.k * c.theta;
  // log(1 + e^{score}) via logsumexp for stability at large |score|.
  Eigen::Vector2d pair(0.0, score);
  return logsumexp(pair) - coupled_log_normalizer(c);
}

double coupled_log_pseudo_grad(const policies::CoupledPolicy& c, int s) {
  check_coupled_state(s);
  const double own_term = (s == 0) ? sigmoid(c.theta) : c.k * sigmoid(c.k * c.theta);
  // d/dtheta of the log normalizer: softmax weights over {ln 2, theta, k theta}
  // contribute 0, 1 and k respectively.
  Eigen::Vector3d entries(std::log(2.0), c.theta, c.k * c.theta);
  const Eigen::Vector3d w = softmax(entries);
  return own_term - (w(1) + c.k * w(2));
}

}  // namespace edmlab::ebm

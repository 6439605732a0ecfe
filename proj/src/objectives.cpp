#include "edmlab/objectives.hpp"

#include <cmath>
#include <string>

#include "edmlab/ebm.hpp"
#include "edmlab/errors.hpp"
#include "edmlab/numerics.hpp"

namespace edmlab::objectives {

namespace {

void check_weights(const Eigen::VectorXd& w) {
  if (w.size() == 0) throw BadShape("empty state weight vector");
  if (w.minCoeff() < 0.0 || std::abs(w.sum() - 1.0) > 1e-12)
    throw InvalidArgument("state weights must be a probability vector");
}

// The expert as an action-probability table, whatever its parameterization.
Eigen::MatrixXd expert_table(const PopulationSpec& spec) {
  if (const auto* c = std::get_if<policies::CoupledPolicy>(&spec.expert))
    return policies::action_prob_table(policies::coupled_to_softmax(*c));
  return policies::action_prob_table(std::get<policies::SoftmaxPolicy>(spec.expert));
}

const policies::CoupledPolicy& expert_coupled(const PopulationSpec& spec) {
  const auto* c = std::get_if<policies::CoupledPolicy>(&spec.expert);
  if (c == nullptr) throw InvalidArgument("this operation needs a coupled-family expert");
  return *c;
}

// E[-log pi(a|s)] under joint w(s) * expert(a|s).
double bc_loss_table(const policies::SoftmaxPolicy& p, const Eigen::VectorXd& w,
                     const Eigen::MatrixXd& expert) {
  check_weights(w);
  if (expert.rows() != p.n_states() || expert.cols() != p.n_actions())
    throw DimensionMismatch("expert table is " + std::to_string(expert.rows()) + "x" +
                            std::to_string(expert.cols()));
  if (w.size() != p.n_states())
    throw DimensionMismatch("state weights have length " + std::to_string(w.size()));
  double loss = 0.0;
  for (int s = 0; s < p.n_states(); ++s) {
    if (w(s) == 0.0) continue;
    for (int a = 0; a < p.n_actions(); ++a) {
      if (expert(s, a) == 0.0) continue;
      loss -= w(s) * expert(s, a) * policies::log_prob(p, s, a);
    }
  }
  return loss;
}

}  // namespace

double bc_loss(const policies::SoftmaxPolicy& p, const policies::DemoDataset& data) {
  const mdp::JointDist joint = policies::empirical_joint(data, p.n_states(), p.n_actions());
  double loss = 0.0;
  for (int s = 0; s < p.n_states(); ++s)
    for (int a = 0; a < p.n_actions(); ++a)
      if (joint.probs(s, a) != 0.0) loss -= joint.probs(s, a) * policies::log_prob(p, s, a);
  return loss;
}

double bc_loss(const policies::SoftmaxPolicy& p, const PopulationSpec& spec) {
  return bc_loss_table(p, spec.state_weights, expert_table(spec));
}

double bc_loss(const policies::CoupledPolicy& c, const PopulationSpec& spec) {
  return bc_loss_table(policies::coupled_to_softmax(c), spec.state_weights, expert_table(spec));
}

double edm_loss(const policies::SoftmaxPolicy& p, const policies::DemoDataset& data) {
  const mdp::JointDist joint = policies::empirical_joint(data, p.n_states(), p.n_actions());
  const Eigen::VectorXd log_p = ebm::pseudo_state_dist(p).probs.array().log();
  double state_term = 0.0;
  for (int s = 0; s < p.n_states(); ++s) state_term -= joint.probs.row(s).sum() * log_p(s);
  return bc_loss(p, data) + state_term;
}

double edm_loss(const policies::SoftmaxPolicy& p, const PopulationSpec& spec) {
  check_weights(spec.state_weights);
  if (spec.state_weights.size() != p.n_states())
    throw DimensionMismatch("state weights have length " +
                            std::to_string(spec.state_weights.size()));
  const Eigen::VectorXd log_p = ebm::pseudo_state_dist(p).probs.array().log();
  return bc_loss(p, spec) - spec.state_weights.dot(log_p);
}

double edm_loss(const policies::CoupledPolicy& c, const PopulationSpec& spec) {
  check_weights(spec.state_weights);
  if (spec.state_weights.size() != 2)
    throw DimensionMismatch("coupled family needs exactly two state weights");
  double state_term = 0.0;
  for (int s = 0; s < 2; ++s) state_term -= spec.state_weights(s) * ebm::coupled_log_pseudo(c, s);
  return bc_loss(c, spec) + state_term;
}

double bc_population_gradient(const policies::CoupledPolicy& c, const PopulationSpec& spec) {
  check_weights(spec.state_weights);
  if (spec.state_weights.size() != 2)
    throw DimensionMismatch("coupled family needs exactly two state weights");
  const policies::CoupledPolicy& exp_pol = expert_coupled(spec);
  if (exp_pol.k != c.k) throw MismatchedK(c.k, exp_pol.k);
  const double w1 = spec.state_weights(0);
  const double w2 = spec.state_weights(1);
  return -(w1 * (sigmoid(exp_pol.theta) - sigmoid(c.theta)) +
           w2 * c.k * (sigmoid(c.k * exp_pol.theta) - sigmoid(c.k * c.theta)));
}

GradientReport edm_population_gradient(const policies::CoupledPolicy& c,
                                       const PopulationSpec& spec) {
  GradientReport report;
  report.bc_term = bc_population_gradient(c, spec);
  report.state_term = -(spec.state_weights(0) * ebm::coupled_log_pseudo_grad(c, 0) +
                        spec.state_weights(1) * ebm::coupled_log_pseudo_grad(c, 1));
  report.total = report.bc_term + report.state_term;

  report.fd_total = finite_diff(
      [&](double theta) {
        return edm_loss(policies::CoupledPolicy{theta, c.k}, spec);
      },
      c.theta);
  const double err = std::abs(report.total - report.fd_total);
  report.max_rel_err = err / std::max(std::abs(report.fd_total), 1e-8);
  if (err > std::max(1e-6 * std::abs(report.fd_total), 1e-8))
    throw FdMismatch("combined-objective gradient " + std::to_string(report.total) +
                     " vs finite difference " + std::to_string(report.fd_total));
  return report;
}

Eigen::VectorXd finite_diff(const std::function<double(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_diff step must be positive");
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = fn(probe);
    probe(i) = x(i) - h;
    const double down = fn(probe);
    probe(i) = x(i);
    if (!std::isfinite(up) || !std::isfinite(down))
      throw NonFiniteEvaluation("objective non-finite near component " + std::to_string(i));
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

double finite_diff(const std::function<double(double)>& fn, double x, double h) {
  const Eigen::VectorXd grad = finite_diff(
      [&](const Eigen::VectorXd& v) { return fn(v(0)); }, Eigen::VectorXd::Constant(1, x), h);
  return grad(0);
}

DescentTrace gradient_descent(Objective objective, double theta0, double lr, int steps,
                              const PopulationSpec& spec) {
  if (!(lr > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (steps < 1) throw InvalidArgument("need at least one step");
  check_weights(spec.state_weights);
  const double k = expert_coupled(spec).k;

  DescentTrace trace;
  trace.rows.reserve(static_cast<std::size_t>(steps) + 1);
  double theta = theta0;
  for (int step = 0; step <= steps; ++step) {
    const policies::CoupledPolicy current{theta, k};
    DescentRow row;
    row.step = step;
    row.theta = theta;
    row.bc_loss = bc_loss(current, spec);
    row.edm_loss = edm_loss(current, spec);
    row.grad_total = (objective == Objective::Bc)
                         ? bc_population_gradient(current, spec)
                         : edm_population_gradient(current, spec).total;
    trace.rows.push_back(row);
    if (step == steps) break;
    theta -= lr * row.grad_total;
    if (!std::isfinite(theta) || std::abs(theta) > 1e6)
      throw Divergence("parameter reached " + std::to_string(theta) + " at step " +
                       std::to_string(step + 1));
  }
  return trace;
}

}  // namespace edmlab::objectives

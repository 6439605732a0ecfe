#include "edmlab/counterexamples.hpp"

#include <cmath>
#include <string>

#include "edmlab/ebm.hpp"
#include "edmlab/errors.hpp"
#include "edmlab/numerics.hpp"

namespace edmlab::counterexamples {

namespace {

constexpr double kTight = 1e-12;

bool within(double observed, double expected, double tol) {
  return std::abs(observed - expected) <= tol;
}

mdp::TabularMdp self_loop_mdp(int n_states, int n_actions) {
  mdp::TabularMdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.transitions.assign(static_cast<std::size_t>(n_actions),
                       Eigen::MatrixXd::Identity(n_states, n_states));
  m.initial = Eigen::VectorXd::Zero(n_states);
  m.initial(0) = 1.0;
  return m;
}

}  // namespace

CheckResult example1_check(int n_states, int n_actions) {
  if (n_states < 2) throw InvalidArgument("example1 needs at least two states");
  if (n_actions < 1) throw InvalidArgument("example1 needs at least one action");

  const mdp::TabularMdp m = self_loop_mdp(n_states, n_actions);
  const policies::SoftmaxPolicy uniform_policy(Eigen::MatrixXd::Zero(n_states, n_actions));
  const Eigen::MatrixXd table = policies::action_prob_table(uniform_policy);

  const mdp::StateDist d_disc = mdp::visitation_discounted(m, table);
  const mdp::StateDist d_stat = mdp::visitation_stationary(m, table);

  // The model side: uniform state model (identical logit rows) times the
  // policy gives the uniform joint; marginalize actions back out.
  const ebm::PseudoStateDist p = ebm::pseudo_state_dist(uniform_policy);
  const mdp::JointDist joint = ebm::joint_model(uniform_policy, p);
  const Eigen::VectorXd marginal = joint.probs.rowwise().sum();

  const double expected_tv = 1.0 - 1.0 / static_cast<double>(n_states);

  CheckResult r;
  r.name = "example1";
  r.tolerance = kTight;
  r.observed["n_states"] = n_states;
  r.observed["tv_discounted"] =
      tv_distance(d_disc.probs, marginal);
  r.observed["tv_stationary"] =
      tv_distance(d_stat.probs, marginal);
  r.observed["model_state_marginal_max_dev"] =
      (marginal.array() - 1.0 / n_states).abs().maxCoeff();
  r.observed["visitation_mass_s0_discounted"] = d_disc.probs(0);
  r.observed["visitation_mass_s0_stationary"] = d_stat.probs(0);

  r.expected["n_states"] = n_states;
  r.expected["tv_discounted"] = expected_tv;
  r.expected["tv_stationary"] = expected_tv;
  r.expected["model_state_marginal"] = 1.0 / static_cast<double>(n_states);
  r.expected["model_state_marginal_max_dev"] = 0.0;
  r.expected["visitation_mass_s0_discounted"] = 1.0;
  r.expected["visitation_mass_s0_stationary"] = 1.0;

  r.passed = within(r.observed["tv_discounted"], expected_tv, kTight) &&
             within(r.observed["tv_stationary"], expected_tv, kTight) &&
             r.observed["model_state_marginal_max_dev"] <= kTight &&
             within(r.observed["visitation_mass_s0_discounted"], 1.0, kTight) &&
             within(r.observed["visitation_mass_s0_stationary"], 1.0, kTight);
  return r;
}

CheckResult example2_check(const policies::SoftmaxPolicy& policy,
                           const mdp::TabularMdp& contrast) {
  if (policy.n_states() != contrast.n_states || policy.n_actions() != contrast.n_actions)
    throw DimensionMismatch("policy and contrast MDP disagree on state/action counts");
  const int n = policy.n_states();

  // Gauge chosen to cancel each state's score normalizer exactly.
  Eigen::VectorXd gauge(n);
  for (int s = 0; s < n; ++s) gauge(s) = -logsumexp(policy.logits.row(s).transpose());
  const policies::SoftmaxPolicy gauged(policy.logits, gauge);

  double max_prob_change = 0.0;
  for (int s = 0; s < n; ++s) {
    const Eigen::VectorXd before = policies::action_probs(policy, s);
    const Eigen::VectorXd after = policies::action_probs(gauged, s);
    max_prob_change = std::max(max_prob_change, (before - after).cwiseAbs().maxCoeff());
  }

  const ebm::PseudoStateDist gauged_model = ebm::pseudo_state_dist_gauged(gauged);
  const double max_uniform_dev =
      (gauged_model.probs.array() - 1.0 / n).abs().maxCoeff();

  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
  const mdp::StateDist d =
      mdp::visitation_discounted(contrast, policies::action_prob_table(policy));
  const double tv_contrast = tv_distance(uniform, d.probs);
  if (tv_contrast < 1e-9)
    throw DegenerateContrast("supplied MDP/policy visitation is itself uniform (TV " +
                             std::to_string(tv_contrast) + ")");

  CheckResult r;
  r.name = "example2";
  r.tolerance = kTight;
  r.observed["max_action_prob_change"] = max_prob_change;
  r.observed["max_uniform_deviation"] = max_uniform_dev;
  r.observed["tv_uniform_vs_visitation"] = tv_contrast;
  r.expected["max_action_prob_change"] = 0.0;
  r.expected["max_uniform_deviation"] = 0.0;
  r.expected["tv_uniform_vs_visitation_min"] = 1e-9;
  r.passed = max_prob_change <= kTight && max_uniform_dev <= kTight && tv_contrast >= 1e-9;
  return r;
}

CheckResult example3_check(double k) {
  const policies::CoupledPolicy start{0.0, k};
  const double grad_s2 = ebm::coupled_log_pseudo_grad(start, 1);
  const double closed_form = (k - 1.0) / 4.0;
  const double identity_dev = std::abs(grad_s2 - closed_form);

  objectives::PopulationSpec spec;
  spec.state_weights = Eigen::VectorXd::Constant(2, 0.5);
  spec.expert = policies::CoupledPolicy{1.0, k};
  const double bc_grad = objectives::bc_population_gradient(start, spec);

  const bool away_push_applicable = k < 1.0;

  CheckResult r;
  r.name = "example3";
  r.tolerance = kTight;
  r.observed["k"] = k;
  r.observed["log_pseudo_grad_s2"] = grad_s2;
  r.observed["closed_form_identity_dev"] = identity_dev;
  r.observed["bc_gradient"] = bc_grad;
  r.observed["away_push_applicable"] = away_push_applicable ? 1.0 : 0.0;
  r.expected["k"] = k;
  r.expected["log_pseudo_grad_s2"] = closed_form;
  r.expected["closed_form_identity_dev"] = 0.0;
  r.expected["bc_gradient_max"] = 0.0;  // strictly negative: descent moves toward the expert

  r.passed = identity_dev <= kTight && bc_grad < 0.0 &&
             (!away_push_applicable || grad_s2 < 0.0);
  return r;
}

CheckResult theorem1_check() {
  const policies::CoupledPolicy at_expert{1.0, 0.5};
  objectives::PopulationSpec spec;
  spec.state_weights = Eigen::VectorXd::Constant(2, 0.5);
  spec.expert = at_expert;

  const double grad_s2 = ebm::coupled_log_pseudo_grad(at_expert, 1);
  const double fd_s2 = objectives::finite_diff(
      [&](double theta) {
        return ebm::coupled_log_pseudo(policies::CoupledPolicy{theta, at_expert.k}, 1);
      },
      at_expert.theta);
  if (std::abs(grad_s2 - fd_s2) > std::max(1e-6 * std::abs(fd_s2), 1e-8))
    throw FdMismatch("state-model gradient " + std::to_string(grad_s2) +
                     " vs finite difference " + std::to_string(fd_s2));

  const double bc_grad = objectives::bc_population_gradient(at_expert, spec);
  const objectives::GradientReport report = objectives::edm_population_gradient(at_expert, spec);

  CheckResult r;
  r.name = "theorem1";
  r.tolerance = 5e-4;
  r.observed["log_pseudo_grad_s2"] = grad_s2;
  r.observed["bc_gradient"] = bc_grad;
  r.observed["edm_state_term"] = report.state_term;
  r.observed["edm_total_gradient"] = report.total;
  r.observed["fd_total"] = report.fd_total;
  r.expected["log_pseudo_grad_s2"] = -0.245;
  r.expected["bc_gradient"] = 0.0;
  r.expected["edm_total_gradient_min_abs"] = 0.03;

  r.passed = within(grad_s2, -0.245, 5e-4) && std::abs(bc_grad) <= kTight &&
             std::abs(report.total) > 0.03;
  return r;
}

ConsistencyResult consistency_experiment(double k, const Eigen::VectorXd& weights, double lr,
                                         int steps) {
  objectives::PopulationSpec spec;
  spec.state_weights = weights;
  spec.expert = policies::CoupledPolicy{1.0, k};

  ConsistencyResult result;
  result.bc = objectives::gradient_descent(objectives::Objective::Bc, 0.0, lr, steps, spec);
  result.edm = objectives::gradient_descent(objectives::Objective::Edm, 0.0, lr, steps, spec);

  const double bc_gap = std::abs(result.bc.final_theta() - 1.0);
  if (bc_gap >= 1e-3)
    throw Error("action-matching descent should land on the expert but ended " +
                std::to_string(bc_gap) + " away; increase steps");
  return result;
}

}  // namespace edmlab::counterexamples

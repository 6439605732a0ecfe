#pragma once

#include <map>
#include <string>

#include <Eigen/Dense>

#include "edmlab/mdp.hpp"
#include "edmlab/objectives.hpp"
#include "edmlab/policies.hpp"

namespace edmlab::counterexamples {

// Structured verdict of one self-checking scenario. observed holds what was
// computed, expected holds the reference values (plus *_min / *_max entries
// encoding one-sided bounds); passed is the conjunction of all comparisons at
// the stated tolerance. Maps are ordered so serialized reports are stable.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::map<std::string, double> observed;
  std::map<std::string, double> expected;
  double tolerance = 0.0;
};

// Scenario "example1" — visitation vs model marginal on a self-loop MDP.
// Every policy stays at the start state forever, so the true state
// distribution is a point mass; the model's uniform joint puts 1/|S|
// everywhere; their total-variation gap is exactly 1 - 1/|S| in both
// visitation modes.
CheckResult example1_check(int n_states, int n_actions);

// Scenario "example2" — the gauge moves the state model without moving the
// policy. With gauge(s) = -logsumexp_a logits(s, a) the gauged state model is
// exactly uniform while every action distribution is unchanged; the supplied
// MDP provides the contrast (its visitation must NOT be uniform, otherwise
// DegenerateContrast asks the caller for a different instance).
CheckResult example2_check(const policies::SoftmaxPolicy& policy, const mdp::TabularMdp& contrast);

// Scenario "example3" — at theta = 0 the coupled family's state-model
// gradient equals (k - 1) / 4 in closed form, so for k < 1 it is negative
// while the action-matching gradient (expert at theta_E = 1) is also
// negative: descent on the combined loss is pulled away from the expert by
// the state term. For k > 1 the push reverses and the away-push claim is
// reported as not applicable; k = 1 is the degenerate zero.
CheckResult example3_check(double k);

// Scenario "theorem1" — at the expert's own parameter (theta = theta_E = 1,
// k = 1/2, uniform state weights) the action-matching gradient vanishes but
// the state term does not: the combined objective's optimum is not at the
// expert. Cross-checks every gradient against finite differences.
CheckResult theorem1_check();

// Paired descent on both population objectives from theta0 = 0 toward an
// expert at theta_E = 1. The action-matching run must end within 1e-3 of the
// expert (throws Error otherwise — that convergence is a postcondition, not
// a finding); the combined run's endpoint is reported for the caller to
// judge.
struct ConsistencyResult {
  objectives::DescentTrace bc;
  objectives::DescentTrace edm;
};
ConsistencyResult consistency_experiment(double k, const Eigen::VectorXd& weights, double lr,
                                         int steps);

}  // namespace edmlab::counterexamples

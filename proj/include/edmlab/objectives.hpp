#pragma once

#include <functional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "edmlab/policies.hpp"

namespace edmlab::objectives {

// Exact (infinite-sample) description of where demonstrations come from:
// a distribution over states plus the expert policy that picks actions there.
// The joint is state_weights(s) * expert(a|s); using a free weight vector
// keeps the analysis independent of any particular transition dynamics.
struct PopulationSpec {
  Eigen::VectorXd state_weights;
  std::variant<policies::SoftmaxPolicy, policies::CoupledPolicy> expert;
};

// Scalar-parameter gradient of the combined objective, split into its two
// terms, with a finite-difference cross-check.
// All gradients here and below follow one convention: they are gradients of
// the LOSS, so descent subtracts them and a negative value pushes the
// parameter up.
struct GradientReport {
  double bc_term = 0.0;     // d/dtheta of the action-matching term
  double state_term = 0.0;  // d/dtheta of the -log p(s) term
  double total = 0.0;       // bc_term + state_term
  double fd_total = 0.0;    // central finite difference of the full loss
  double max_rel_err = 0.0; // |total - fd_total| relative to fd (floored)
};

struct DescentRow {
  int step = 0;
  double theta = 0.0;
  double bc_loss = 0.0;
  double edm_loss = 0.0;
  double grad_total = 0.0;  // gradient of the objective being descended, at theta
};

// Row r holds the parameter after r updates; row 0 is the starting point.
struct DescentTrace {
  std::vector<DescentRow> rows;
  double final_theta() const { return rows.back().theta; }
};

enum class Objective { Bc, Edm };

// Action-matching loss E[-log pi(a|s)] under an empirical joint ...
double bc_loss(const policies::SoftmaxPolicy& p, const policies::DemoDataset& data);
// ... or under the exact population joint.
double bc_loss(const policies::SoftmaxPolicy& p, const PopulationSpec& spec);
double bc_loss(const policies::CoupledPolicy& c, const PopulationSpec& spec);

// Combined loss: bc_loss plus E_w[-log p(s)] where p is the model's own
// state distribution (ungauged tabular map for SoftmaxPolicy, the coupled
// closed form for CoupledPolicy).
double edm_loss(const policies::SoftmaxPolicy& p, const policies::DemoDataset& data);
double edm_loss(const policies::SoftmaxPolicy& p, const PopulationSpec& spec);
double edm_loss(const policies::CoupledPolicy& c, const PopulationSpec& spec);

// d/dtheta of bc_loss for the coupled family (expert must be a CoupledPolicy
// with the same k; MismatchedK otherwise):
//   -( w(s1) (sigmoid(theta_E) - sigmoid(theta))
//    + w(s2) k (sigmoid(k theta_E) - sigmoid(k theta)) ).
// Zero exactly at theta == theta_E.
double bc_population_gradient(const policies::CoupledPolicy& c, const PopulationSpec& spec);

// Full gradient report for the combined loss. The analytic total is verified
// against central finite differences internally; a disagreement beyond
// max(1e-6 |fd|, 1e-8) throws FdMismatch (an implementation bug, never
// swallowed).
GradientReport edm_population_gradient(const policies::CoupledPolicy& c,
                                       const PopulationSpec& spec);

// Central finite differences, component-wise, default h = 1e-5. Throws
// NonFiniteEvaluation if fn returns NaN/inf at a probe point.
Eigen::VectorXd finite_diff(const std::function<double(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& x, double h = 1e-5);
// Scalar convenience wrapper.
double finite_diff(const std::function<double(double)>& fn, double x, double h = 1e-5);

// Plain fixed-step descent on the chosen population objective over the
// coupled family's scalar parameter. Deterministic; records every step
// (steps + 1 rows including the start). Throws Divergence if |theta|
// exceeds 1e6, InvalidArgument for lr <= 0 or steps < 1.
DescentTrace gradient_descent(Objective objective, double theta0, double lr, int steps,
                              const PopulationSpec& spec);

}  // namespace edmlab::objectives

#pragma once

#include <Eigen/Dense>

#include "edmlab/mdp.hpp"
#include "edmlab/policies.hpp"

namespace edmlab::ebm {

// Per-state energy derived from the policy's raw action scores:
//   E(s) = logsumexp_a logits(s, a).
// The gauge is deliberately excluded — energies are a function of the raw
// scores, which is exactly why the gauge can move the state model without
// moving the policy.
struct EnergyTable {
  Eigen::VectorXd values;
};

// Normalized distribution over states built from the energies, together
// with the gauge under which it was computed (all-zero for the ungauged map).
struct PseudoStateDist {
  Eigen::VectorXd probs;
  Eigen::VectorXd gauge_used;
};

EnergyTable energy(const policies::SoftmaxPolicy& p);

// Ungauged state model: p(s) = softmax_s(-E(s)), i.e. low-energy states get
// high mass. Defined only for gauge == 0; call the gauged variant otherwise
// (throws GaugeNotZero so the caller must choose explicitly).
PseudoStateDist pseudo_state_dist(const policies::SoftmaxPolicy& p);

// Gauged state model: p(s) proportional to e^{-gauge(s)} / sum_a e^{logits(s,a)}.
// Reduces to pseudo_state_dist when the gauge is all-zero. Choosing
// gauge(s) = -logsumexp_a logits(s, a) makes this exactly uniform for any
// logits — the policy is untouched while the state model collapses.
PseudoStateDist pseudo_state_dist_gauged(const policies::SoftmaxPolicy& p);

// Model joint over (s, a): probs(s, a) = d(s) * pi(a|s).
mdp::JointDist joint_model(const policies::SoftmaxPolicy& p, const PseudoStateDist& d);

// Gradient of log p(s) for the ungauged state model with respect to every
// logit: d log p(s) / d logits(s', a') = -[s'==s] pi(a'|s) + p(s') pi(a'|s').
// Requires gauge == 0 (GaugeNotZero otherwise).
Eigen::MatrixXd grad_log_pseudo(const policies::SoftmaxPolicy& p, int s);

// The two-state coupled family carries its own closed-form state model in
// which each state's mass is proportional to its action-score normalizer:
//   log p(s1) = log(1 + e^{theta})   - log(2 + e^{theta} + e^{k theta})
//   log p(s2) = log(1 + e^{k theta}) - log(2 + e^{theta} + e^{k theta})
// Note the orientation: here MORE total action score means MORE state mass,
// the opposite of the tabular softmax(-E) map above. Both conventions give
// the same product p(s1) p(s2), so uniformly-weighted totals agree; per-state
// values and gradients do not. Each family is finite-difference-verified
// against its own log p.
double coupled_log_pseudo(const policies::CoupledPolicy& c, int s = 1);

// d/dtheta of coupled_log_pseudo. For s2:
//   k e^{k theta} / (1 + e^{k theta}) - (e^{theta} + k e^{k theta}) / (2 + e^{theta} + e^{k theta})
// and symmetrically for s1 (first term becomes e^{theta} / (1 + e^{theta})).
double coupled_log_pseudo_grad(const policies::CoupledPolicy& c, int s = 1);

}  // namespace edmlab::ebm

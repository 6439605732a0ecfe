#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace edmlab::mdp {

// Finite MDP: states and actions are dense 0-based indices.
// transitions[a](s, s') is the probability of landing in s' after taking
// action a in state s; every such row is a distribution over s'.
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<Eigen::MatrixXd> transitions;  // one n_states x n_states matrix per action
  Eigen::VectorXd initial;                   // distribution over start states
  double gamma = 0.99;                       // occupancy discount, in [0, 1)
};

enum class DistKind { Discounted, Stationary, FiniteHorizon, Exact };

// Distribution over states.
struct StateDist {
  Eigen::VectorXd probs;
  DistKind kind = DistKind::Exact;
};

// Distribution over (state, action) pairs; probs(s, a).
struct JointDist {
  Eigen::MatrixXd probs;
  DistKind kind = DistKind::Exact;
};

// One episode of (state, action) pairs; length equals horizon.
struct Trajectory {
  std::vector<std::pair<int, int>> steps;
  int horizon = 0;
};

// Throws RowNotStochastic / BadInitial / BadShape naming the offending index
// if any TabularMdp invariant fails; returns normally otherwise.
void validate_mdp(const TabularMdp& m);

// Policies are passed to this module as a row-stochastic table
// action_probs(s, a) = pi(a | s), so the visitation solvers do not depend on
// any particular policy parameterization.

// State-to-state chain under the policy: P_pi(s, s') = sum_a pi(a|s) P[s][a][s'].
Eigen::MatrixXd policy_transition_matrix(const TabularMdp& m, const Eigen::MatrixXd& action_probs);

// Normalized discounted occupancy: solves (I - gamma P_pi^T) x = (1 - gamma) mu
// by dense LU with iterative refinement. Throws SolverFailure if the residual
// exceeds 1e-8 or negative mass beyond rounding dust appears.
StateDist visitation_discounted(const TabularMdp& m, const Eigen::MatrixXd& action_probs);

// Fixed point of the lazy chain 0.5 (I + P_pi^T), found by power iteration
// seeded at the initial distribution (laziness guarantees convergence for
// periodic chains without moving the fixed point; the seed picks a canonical
// answer when several fixed points exist). Throws NoConvergence after 100000
// iterations.
StateDist visitation_stationary(const TabularMdp& m, const Eigen::MatrixXd& action_probs);

// probs(s, a) = d(s) * pi(a|s).
JointDist joint_visitation(const StateDist& d, const Eigen::MatrixXd& action_probs);

// Seeded episodes: states drawn from the initial distribution and the
// transition tensor, actions from the policy table. Episode e uses the
// dedicated substream (seed, e), so results are independent of episode order
// and reproducible for a given seed.
std::vector<Trajectory> rollout(const TabularMdp& m, const Eigen::MatrixXd& action_probs,
                                int episodes, int horizon, std::uint64_t seed);

// Half the L1 distance between two state distributions.
double tv_distance(const StateDist& p, const StateDist& q);

}  // namespace edmlab::mdp

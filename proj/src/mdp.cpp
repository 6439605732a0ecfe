#include "edmlab/mdp.hpp"

#include <cmath>
#include <string>

#include "edmlab/errors.hpp"
#include "edmlab/numerics.hpp"
#include "edmlab/rng.hpp"

namespace edmlab::mdp {

namespace {

constexpr double kRowTol = 1e-12;    // stochasticity tolerance for inputs
constexpr double kDustTol = -1e-14;  // negative entries above this are rounding dust

// Clamp rounding dust to zero and rescale to an exact unit sum.
// Entries more negative than dust indicate a solver problem; the caller
// checks residuals before getting here, so we only guard against surprises.
Eigen::VectorXd cleaned_distribution(Eigen::VectorXd x, const char* who) {
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) < 0.0) {
      if (x(i) < kDustTol)
        throw SolverFailure(std::string(who) + ": negative mass " + std::to_string(x(i)) +
                            " at state " + std::to_string(i));
      x(i) = 0.0;
    }
  }
  const double total = x.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw SolverFailure(std::string(who) + ": mass does not sum to a positive finite value");
  return x / total;
}

void check_policy_table(const TabularMdp& m, const Eigen::MatrixXd& action_probs) {
  if (action_probs.rows() != m.n_states || action_probs.cols() != m.n_actions)
    throw DimensionMismatch("policy table is " + std::to_string(action_probs.rows()) + "x" +
                            std::to_string(action_probs.cols()) + ", MDP needs " +
                            std::to_string(m.n_states) + "x" + std::to_string(m.n_actions));
  for (int s = 0; s < m.n_states; ++s) {
    if (std::abs(action_probs.row(s).sum() - 1.0) > kRowTol || action_probs.row(s).minCoeff() < 0.0)
      throw InvalidArgument("policy row " + std::to_string(s) + " is not a distribution");
  }
}

}  // namespace

void validate_mdp(const TabularMdp& m) {
  if (m.n_states <= 0 || m.n_actions <= 0)
    throw BadShape("n_states and n_actions must be positive");
  if (static_cast<int>(m.transitions.size()) != m.n_actions)
    throw BadShape("expected " + std::to_string(m.n_actions) + " transition matrices, got " +
                   std::to_string(m.transitions.size()));
  for (int a = 0; a < m.n_actions; ++a) {
    const auto& P = m.transitions[a];
    if (P.rows() != m.n_states || P.cols() != m.n_states)
      throw BadShape("transition matrix for action " + std::to_string(a) + " is " +
                     std::to_string(P.rows()) + "x" + std::to_string(P.cols()));
    for (int s = 0; s < m.n_states; ++s) {
      if (P.row(s).minCoeff() < 0.0)
        throw RowNotStochastic(s, a, "negative entry");
      const double sum = P.row(s).sum();
      if (std::abs(sum - 1.0) > kRowTol)
        throw RowNotStochastic(s, a, "row sums to " + std::to_string(sum));
    }
  }
  if (m.initial.size() != m.n_states)
    throw BadInitial("length " + std::to_string(m.initial.size()) + ", expected " +
                     std::to_string(m.n_states));
  if (m.initial.minCoeff() < 0.0) throw BadInitial("negative entry");
  if (std::abs(m.initial.sum() - 1.0) > kRowTol)
    throw BadInitial("sums to " + std::to_string(m.initial.sum()));
  if (!(m.gamma >= 0.0 && m.gamma < 1.0))
    throw BadShape("gamma must lie in [0, 1), got " + std::to_string(m.gamma));
}

Eigen::MatrixXd policy_transition_matrix(const TabularMdp& m, const Eigen::MatrixXd& action_probs) {
  validate_mdp(m);
  check_policy_table(m, action_probs);
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(m.n_states, m.n_states);
  for (int a = 0; a < m.n_actions; ++a)
    chain += action_probs.col(a).asDiagonal() * m.transitions[a];
  return chain;
}

StateDist visitation_discounted(const TabularMdp& m, const Eigen::MatrixXd& action_probs) {
  const Eigen::MatrixXd chain = policy_transition_matrix(m, action_probs);
  const int n = m.n_states;
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - m.gamma * chain.transpose();
  const Eigen::VectorXd b = (1.0 - m.gamma) * m.initial;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd x = lu.solve(b);
  // One pass of iterative refinement covers larger/badly-scaled systems.
  for (int pass = 0; pass < 3; ++pass) {
    const Eigen::VectorXd r = b - A * x;
    if (r.lpNorm<Eigen::Infinity>() < 1e-14) break;
    x += lu.solve(r);
  }

  const double residual = (A * x - b).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-8))
    throw SolverFailure("discounted occupancy residual " + std::to_string(residual));
  return StateDist{cleaned_distribution(std::move(x), "visitation_discounted"),
                   DistKind::Discounted};
}

StateDist visitation_stationary(const TabularMdp& m, const Eigen::MatrixXd& action_probs) {
  const Eigen::MatrixXd chain_t = policy_transition_matrix(m, action_probs).transpose();
  Eigen::VectorXd x = m.initial;
  constexpr int kMaxIters = 100000;
  for (int it = 0; it < kMaxIters; ++it) {
    // Lazy update: residual of the lazy map is half the chain residual, so a
    // 1e-12 stop here leaves the returned point within 2e-12 of chain-invariance.
    const Eigen::VectorXd next = 0.5 * (x + chain_t * x);
    const double delta = (next - x).lpNorm<1>();
    x = next;
    if (delta < 1e-12)
      return StateDist{cleaned_distribution(std::move(x), "visitation_stationary"),
                       DistKind::Stationary};
  }
  throw NoConvergence("stationary power iteration exceeded " + std::to_string(kMaxIters) +
                      " iterations");
}

JointDist joint_visitation(const StateDist& d, const Eigen::MatrixXd& action_probs) {
  if (d.probs.size() != action_probs.rows())
    throw DimensionMismatch("state distribution has " + std::to_string(d.probs.size()) +
                            " states, policy table has " + std::to_string(action_probs.rows()));
  JointDist out;
  out.kind = d.kind;
  out.probs = d.probs.asDiagonal() * action_probs;
  return out;
}

std::vector<Trajectory> rollout(const TabularMdp& m, const Eigen::MatrixXd& action_probs,
                                int episodes, int horizon, std::uint64_t seed) {
  validate_mdp(m);
  check_policy_table(m, action_probs);
  if (episodes < 1 || horizon < 1) throw InvalidArgument("episodes and horizon must be >= 1");

  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    SplitRng rng(seed, static_cast<std::uint64_t>(e));
    Trajectory traj;
    traj.horizon = horizon;
    traj.steps.reserve(static_cast<std::size_t>(horizon));
    int s = rng.categorical(m.initial);
    for (int t = 0; t < horizon; ++t) {
      const int a = rng.categorical(action_probs.row(s).transpose());
      traj.steps.emplace_back(s, a);
      s = rng.categorical(m.transitions[a].row(s).transpose());
    }
    out.push_back(std::move(traj));
  }
  return out;
}

double tv_distance(const StateDist& p, const StateDist& q) {
  return edmlab::tv_distance(p.probs, q.probs);
}

}  // namespace edmlab::mdp

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "edmlab/errors.hpp"
#include "edmlab/mdp.hpp"
#include "edmlab/numerics.hpp"
#include "edmlab/objectives.hpp"
#include "edmlab/policies.hpp"
#include "edmlab/rng.hpp"
#include "test_support.hpp"

using namespace edmlab;
using namespace edmlab::policies;

namespace {

SoftmaxPolicy two_state_policy() {
  Eigen::MatrixXd f(2, 2);
  f << 0.0, 1.0, 0.0, -1.0;
  return SoftmaxPolicy(std::move(f));
}

// Flatten a policy's logit table into one vector so the generic
// finite-difference oracle can probe it (row-major order).
Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  int i = 0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) v(i++) = m(r, c);
  return v;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  int i = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = v(i++);
  return m;
}

}  // namespace

TEST_CASE("action_probs basic values") {
  SoftmaxPolicy uniform(Eigen::MatrixXd::Zero(1, 2));
  const Eigen::VectorXd u = action_probs(uniform, 0);
  CHECK(u(0) == 0.5);
  CHECK(u(1) == 0.5);

  const SoftmaxPolicy p = two_state_policy();
  const Eigen::VectorXd row0 = action_probs(p, 0);
  // softmax(0, 1) = (1/(1+e), e/(1+e))
  CHECK(std::abs(row0(0) - 0.2689414213699951) <= 1e-15);
  CHECK(std::abs(row0(1) - 0.7310585786300049) <= 1e-15);

  CHECK_THROWS_AS(action_probs(p, 2), InvalidArgument);
  CHECK_THROWS_AS(action_probs(p, -1), InvalidArgument);
}

TEST_CASE("gauge never moves action probabilities") {
  // Specific odd-valued gauge on a fixed policy.
  SoftmaxPolicy base = two_state_policy();
  SoftmaxPolicy gauged(base.logits, Eigen::Vector2d(5.0, -0.3333333));
  for (int s = 0; s < 2; ++s) {
    const Eigen::VectorXd a = action_probs(base, s);
    const Eigen::VectorXd b = action_probs(gauged, s);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    for (int act = 0; act < 2; ++act) {
      CHECK(std::abs(log_prob(base, s, act) - log_prob(gauged, s, act)) <= 1e-12);
    }
  }

  // Property over random policies and random gauges.
  SplitRng rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_states = 2 + static_cast<int>(rng.next_word() % 4);
    const int n_actions = 2 + static_cast<int>(rng.next_word() % 3);
    SoftmaxPolicy p = testsupport::random_policy(rng, n_states, n_actions);
    Eigen::VectorXd g(n_states);
    for (int s = 0; s < n_states; ++s) g(s) = rng.uniform(-30.0, 30.0);
    SoftmaxPolicy pg(p.logits, g);
    const Eigen::MatrixXd ta = action_prob_table(p);
    const Eigen::MatrixXd tb = action_prob_table(pg);
    CHECK((ta - tb).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("log_prob values and consistency with action_probs") {
  SoftmaxPolicy uniform(Eigen::MatrixXd::Zero(1, 2));
  CHECK(std::abs(log_prob(uniform, 0, 0) + std::log(2.0)) <= 1e-15);

  const SoftmaxPolicy p = two_state_policy();
  // log pi(a2|s1) = 1 - log(1 + e) = -0.3132616875182228
  CHECK(std::abs(log_prob(p, 0, 1) + 0.3132616875182228) <= 1e-15);

  // Always a log-probability: nonpositive and finite, even for extreme logits.
  Eigen::MatrixXd extreme(1, 2);
  extreme << 0.0, 1000.0;
  SoftmaxPolicy pe(std::move(extreme));
  CHECK(log_prob(pe, 0, 1) <= 0.0);
  CHECK(std::isfinite(log_prob(pe, 0, 0)));

  // exp(log_prob) agrees with the probability table.
  SplitRng rng(3);
  SoftmaxPolicy pr = testsupport::random_policy(rng, 3, 4);
  const Eigen::MatrixXd table = action_prob_table(pr);
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 4; ++a)
      CHECK(std::abs(std::exp(log_prob(pr, s, a)) - table(s, a)) <= 1e-14);
}

TEST_CASE("grad_log_prob structure") {
  SoftmaxPolicy uniform(Eigen::MatrixXd::Zero(2, 2));
  const LogProbGrad g = grad_log_prob(uniform, 0, 1);
  CHECK(g.logits(0, 0) == -0.5);
  CHECK(g.logits(0, 1) == 0.5);
  // Other rows untouched; gauge gradient identically zero.
  CHECK(g.logits.row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.gauge.cwiseAbs().maxCoeff() == 0.0);

  SplitRng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_states = 2 + static_cast<int>(rng.next_word() % 3);
    const int n_actions = 2 + static_cast<int>(rng.next_word() % 3);
    SoftmaxPolicy p = testsupport::random_policy(rng, n_states, n_actions);
    const int s = static_cast<int>(rng.next_word() % static_cast<std::uint64_t>(n_states));
    const int a = static_cast<int>(rng.next_word() % static_cast<std::uint64_t>(n_actions));
    const LogProbGrad gr = grad_log_prob(p, s, a);
    // Each row sums to zero at machine precision; off rows are exactly zero.
    for (int r = 0; r < n_states; ++r) {
      if (r == s)
        CHECK(std::abs(gr.logits.row(r).sum()) <= 1e-14);
      else
        CHECK(gr.logits.row(r).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(gr.gauge.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("grad_log_prob matches finite differences") {
  SplitRng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const int n_states = 2 + static_cast<int>(rng.next_word() % 3);
    const int n_actions = 2 + static_cast<int>(rng.next_word() % 3);
    SoftmaxPolicy p = testsupport::random_policy(rng, n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        const LogProbGrad g = grad_log_prob(p, s, a);
        const Eigen::VectorXd fd = objectives::finite_diff(
            [&](const Eigen::VectorXd& v) {
              SoftmaxPolicy probe(unflatten(v, n_states, n_actions), p.gauge);
              return log_prob(probe, s, a);
            },
            flatten(p.logits));
        const Eigen::VectorXd analytic = flatten(g.logits);
        for (int i = 0; i < analytic.size(); ++i) {
          const double tol = std::max(1e-6 * std::abs(analytic(i)), 1e-8);
          CHECK(std::abs(analytic(i) - fd(i)) <= tol);
        }
      }
    }
  }
}

TEST_CASE("coupled_to_softmax materializes the family") {
  // theta = 0: both states uniform.
  const SoftmaxPolicy z = coupled_to_softmax({0.0, 0.7});
  CHECK(action_probs(z, 0)(1) == 0.5);
  CHECK(action_probs(z, 1)(1) == 0.5);
  CHECK(z.gauge.cwiseAbs().maxCoeff() == 0.0);

  // theta = 1, k = 0.5: pi(a2|s1) = sigmoid(1), pi(a2|s2) = sigmoid(0.5).
  const SoftmaxPolicy p = coupled_to_softmax({1.0, 0.5});
  CHECK(std::abs(action_probs(p, 0)(1) - 0.7310585786300049) <= 1e-15);
  CHECK(std::abs(action_probs(p, 1)(1) - 0.6224593312018546) <= 1e-15);

  // k = 1 makes the two states identical.
  const SoftmaxPolicy same = coupled_to_softmax({-1.3, 1.0});
  CHECK((action_probs(same, 0) - action_probs(same, 1)).cwiseAbs().maxCoeff() == 0.0);

  // Grid agreement with the direct logistic formula.
  for (double theta = -3.0; theta <= 3.0; theta += 0.5) {
    for (double k : {0.25, 0.5, 1.0, 2.0}) {
      const SoftmaxPolicy q = coupled_to_softmax({theta, k});
      CHECK(std::abs(action_probs(q, 0)(1) - sigmoid(theta)) <= 1e-12);
      CHECK(std::abs(action_probs(q, 1)(1) - sigmoid(k * theta)) <= 1e-12);
    }
  }

  CHECK_THROWS_AS(coupled_to_softmax({std::nan(""), 1.0}), InvalidArgument);
}

TEST_CASE("coupled_grad_log_prob values and finite differences") {
  // theta = 0: d log pi(a2|s1)/dtheta = 1 - sigmoid(0) = 0.5.
  CHECK(coupled_grad_log_prob({0.0, 0.5}, 0, 1) == 0.5);
  // s2 scales by k: 0.5 * (1 - sigmoid(0)) = 0.25.
  CHECK(coupled_grad_log_prob({0.0, 0.5}, 1, 1) == 0.25);
  CHECK_THROWS_AS(coupled_grad_log_prob({0.0, 0.5}, 2, 0), InvalidArgument);

  for (double theta = -2.0; theta <= 2.0; theta += 1.0) {
    for (double k : {0.25, 0.5, 1.0, 2.0}) {
      for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < 2; ++a) {
          const double analytic = coupled_grad_log_prob({theta, k}, s, a);
          const double fd = objectives::finite_diff(
              [&](double t) { return log_prob(coupled_to_softmax({t, k}), s, a); }, theta);
          CHECK(std::abs(analytic - fd) <= 1e-8);
        }
      }
    }
  }
}

TEST_CASE("empirical_joint from pairs and from weights") {
  // All mass on one cell.
  DemoDataset repeat;
  repeat.pairs = {{0, 1}, {0, 1}, {0, 1}};
  const mdp::JointDist jr = empirical_joint(repeat, 2, 2);
  CHECK(jr.probs(0, 1) == 1.0);
  CHECK(jr.probs.sum() == 1.0);

  // One visit per cell: uniform.
  DemoDataset each;
  each.pairs = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  const mdp::JointDist je = empirical_joint(each, 2, 2);
  CHECK((je.probs - Eigen::MatrixXd::Constant(2, 2, 0.25)).cwiseAbs().maxCoeff() == 0.0);

  // Weights are taken verbatim and take precedence over pairs.
  DemoDataset weighted;
  weighted.pairs = {{0, 0}};
  Eigen::MatrixXd w(2, 2);
  w << 0.1, 0.2, 0.3, 0.4;
  weighted.weights = w;
  CHECK((empirical_joint(weighted, 2, 2).probs - w).cwiseAbs().maxCoeff() == 0.0);

  DemoDataset empty;
  CHECK_THROWS_AS(empirical_joint(empty, 2, 2), EmptyDataset);

  DemoDataset bad = weighted;
  bad.weights->setConstant(0.3);  // sums to 1.2
  CHECK_THROWS_AS(empirical_joint(bad, 2, 2), InvalidArgument);
  bad.weights = Eigen::MatrixXd::Constant(3, 2, 1.0 / 6.0);
  CHECK_THROWS_AS(empirical_joint(bad, 2, 2), DimensionMismatch);

  DemoDataset oob;
  oob.pairs = {{5, 0}};
  CHECK_THROWS_AS(empirical_joint(oob, 2, 2), InvalidArgument);
}

TEST_CASE("empirical_joint of rollout data approaches the sampling joint") {
  // Single self-loop state: the empirical joint over (s, a) must converge to
  // d(s) pi(a|s) with d a point mass.
  mdp::TabularMdp loop;
  loop.n_states = 1;
  loop.n_actions = 2;
  loop.transitions = {Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)};
  loop.initial = Eigen::VectorXd::Ones(1);
  loop.gamma = 0.9;
  Eigen::MatrixXd table(1, 2);
  table << 0.3, 0.7;

  auto trajs = mdp::rollout(loop, table, 1, 100000, 11);
  DemoDataset data;
  data.pairs = trajs[0].steps;
  const mdp::JointDist emp = empirical_joint(data, 1, 2);
  CHECK(std::abs(emp.probs(0, 0) - 0.3) < 0.01);
  CHECK(std::abs(emp.probs(0, 1) - 0.7) < 0.01);
}

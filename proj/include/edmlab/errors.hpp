#pragma once

#include <stdexcept>
#include <string>

namespace edmlab {

// Base class for every error this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A transition row P[s][a][.] is not a probability distribution.
class RowNotStochastic : public Error {
 public:
  RowNotStochastic(int state, int action, const std::string& why)
      : Error("transition row (s=" + std::to_string(state) +
              ", a=" + std::to_string(action) + ") is not stochastic: " + why),
        state(state),
        action(action) {}
  int state;
  int action;
};

// The initial state distribution is not a probability vector.
class BadInitial : public Error {
 public:
  explicit BadInitial(const std::string& why) : Error("bad initial distribution: " + why) {}
};

// A container has the wrong shape for the declared state/action counts.
class BadShape : public Error {
 public:
  explicit BadShape(const std::string& why) : Error("bad shape: " + why) {}
};

// Two arguments disagree on dimensions.
class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& why) : Error("dimension mismatch: " + why) {}
};

// A linear solve produced a residual above tolerance.
class SolverFailure : public Error {
 public:
  explicit SolverFailure(const std::string& why) : Error("solver failure: " + why) {}
};

// An iterative method hit its iteration cap before reaching tolerance.
class NoConvergence : public Error {
 public:
  explicit NoConvergence(const std::string& why) : Error("no convergence: " + why) {}
};

// A dataset with no samples and no weights was supplied.
class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("empty dataset") {}
};

// An operation defined only for gauge == 0 received a gauged policy.
class GaugeNotZero : public Error {
 public:
  GaugeNotZero() : Error("operation requires an all-zero gauge; use the gauged variant") {}
};

// Two coupled policies that must share a coupling constant do not.
class MismatchedK : public Error {
 public:
  MismatchedK(double lhs, double rhs)
      : Error("coupling constants differ: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

// An analytic gradient disagrees with its finite-difference cross-check.
class FdMismatch : public Error {
 public:
  explicit FdMismatch(const std::string& why) : Error("finite-difference mismatch: " + why) {}
};

// A function handed to the finite-difference oracle returned NaN/inf.
class NonFiniteEvaluation : public Error {
 public:
  explicit NonFiniteEvaluation(const std::string& why) : Error("non-finite evaluation: " + why) {}
};

// Gradient descent left the trust region (parameter magnitude above 1e6).
class Divergence : public Error {
 public:
  explicit Divergence(const std::string& why) : Error("divergence: " + why) {}
};

// A sampling chain produced a NaN state (step size too large).
class NonFiniteState : public Error {
 public:
  explicit NonFiniteState(const std::string& why) : Error("non-finite chain state: " + why) {}
};

// The caller asked for a contrast against a distribution that is itself
// uniform, so no contrast exists; pick a different instance.
class DegenerateContrast : public Error {
 public:
  explicit DegenerateContrast(const std::string& why) : Error("degenerate contrast: " + why) {}
};

// Catch-all for violated preconditions (bad flag values, bad file fields).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& why) : Error("invalid argument: " + why) {}
};

}  // namespace edmlab

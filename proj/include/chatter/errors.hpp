#pragma once

#include <stdexcept>
#include <string>

namespace chatter {

/// Base of every error raised by the library.
class ChatterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the domain an operation is defined on.
class DomainError : public ChatterError {
 public:
  using ChatterError::ChatterError;
};

/// xi == 2q, where the boundary analysis does not apply.
class UnsupportedParameters : public DomainError {
 public:
  using DomainError::DomainError;
};

class NoSignChange : public ChatterError {
 public:
  using ChatterError::ChatterError;
};

class MaxIterations : public ChatterError {
 public:
  using ChatterError::ChatterError;
};

class Diverged : public ChatterError {
 public:
  using ChatterError::ChatterError;
};

/// A boundary parameterization was evaluated at a zero of one of its denominators.
class PoleAt : public ChatterError {
 public:
  explicit PoleAt(double beta)
      : ChatterError("pole of the boundary parameterization at beta=" + std::to_string(beta)),
        beta_(beta) {}
  double beta() const noexcept { return beta_; }

 private:
  double beta_;
};

/// Two zeros merge (q sits on the onset of the three-zero regime).
class DegenerateTangency : public ChatterError {
 public:
  using ChatterError::ChatterError;
};

/// The counting contour passes too close to a characteristic root.
class ContourTooClose : public ChatterError {
 public:
  using ChatterError::ChatterError;
};

/// A positivity assumption of the change of variables failed during a run.
class TransformViolated : public ChatterError {
 public:
  TransformViolated(const std::string& what, double eta)
      : ChatterError(what + " at eta=" + std::to_string(eta)), eta_(eta) {}
  double eta() const noexcept { return eta_; }

 private:
  double eta_;
};

class NegativeChipThickness : public ChatterError {
 public:
  explicit NegativeChipThickness(double eta)
      : ChatterError("chip thickness became non-positive at eta=" + std::to_string(eta)),
        eta_(eta) {}
  double eta() const noexcept { return eta_; }

 private:
  double eta_;
};

}  // namespace chatter

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace inhomo {

enum class ModelErrorKind {
  DimensionMismatch,
  NotSymmetric,
  NegativeEntry,
  NonPositiveVertexWeight,
  Reducible,
  ZeroMatrix,
  NotExact,
  InvalidArgument,
};

inline const char* to_string(ModelErrorKind k) {
  switch (k) {
    case ModelErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ModelErrorKind::NotSymmetric: return "NotSymmetric";
    case ModelErrorKind::NegativeEntry: return "NegativeEntry";
    case ModelErrorKind::NonPositiveVertexWeight: return "NonPositiveVertexWeight";
    case ModelErrorKind::Reducible: return "Reducible";
    case ModelErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ModelErrorKind::NotExact: return "NotExact";
    case ModelErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Invalid input: a model that violates an invariant, or arguments outside an
/// operation's domain. Type indices in `partition` are zero-based.
class ModelError : public std::invalid_argument {
 public:
  ModelError(ModelErrorKind kind, const std::string& what,
             std::vector<std::vector<std::size_t>> partition = {})
      : std::invalid_argument(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        partition_(std::move(partition)) {}

  ModelErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::vector<std::size_t>>& partition() const noexcept { return partition_; }

 private:
  ModelErrorKind kind_;
  std::vector<std::vector<std::size_t>> partition_;
};

enum class NumericalErrorKind {
  SingularHessian,
  NoMinimumFound,
  NewtonFailure,
  SingularMatrix,
};

inline const char* to_string(NumericalErrorKind k) {
  switch (k) {
    case NumericalErrorKind::SingularHessian: return "SingularHessian";
    case NumericalErrorKind::NoMinimumFound: return "NoMinimumFound";
    case NumericalErrorKind::NewtonFailure: return "NewtonFailure";
    case NumericalErrorKind::SingularMatrix: return "SingularMatrix";
  }
  return "Unknown";
}

/// A numerical procedure could not deliver a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(NumericalErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  NumericalErrorKind kind() const noexcept { return kind_; }

 private:
  NumericalErrorKind kind_;
};

}  // namespace inhomo

#pragma once

#include <stdexcept>
#include <string>

namespace hecke {

/// Invalid arguments: q < 3, mismatched rings, malformed literals.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A vector that was required to be a generated orbit element is not one.
class NotAMemberError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pair with zero determinant was passed where an independent pair is required.
class DegeneratePairError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The orbit set does not reach far enough to answer the query exactly.
class InsufficientRadiusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generation requested with R < 1.
class EmptyInteriorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive computation ran past its work budget.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal cross-check failed. Always indicates a bug or a case the
/// underlying theory does not cover; never swallowed.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hecke

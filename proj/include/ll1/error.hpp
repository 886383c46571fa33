#pragma once

#include <stdexcept>
#include <string>

namespace ll1 {

/// Input outside an operation's documented domain (bad parameters, sizes, ranges).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The operation is not defined for this regularizer (e.g. a gradient where the
/// inner minimizer is not unique).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A cached linear-system factorization could not be formed.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterate became non-finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

}  // namespace ll1

#pragma once

#include <stdexcept>
#include <string>

namespace exsp {

/// Malformed input: bad sizes, out-of-range parameters, unparsable data.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Well-formed input that a particular routine cannot accept, e.g. an
/// overlapping group structure handed to a disjoint-only solver.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite values or a search that failed to bracket.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace exsp

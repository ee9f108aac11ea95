#pragma once

#include <stdexcept>
#include <string>

namespace fql {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Division/inverse of the zero element.
class InverseOfZero : public Error {
 public:
  InverseOfZero() : Error("inverse of zero") {}
};

// An operation that requires a nonzero vector got the zero vector.
class ZeroVector : public Error {
 public:
  ZeroVector() : Error("zero vector") {}
};

class ArityMismatch : public Error {
 public:
  explicit ArityMismatch(const std::string& what) : Error("arity mismatch: " + what) {}
};

// Enumeration or sampling budget exceeded (subcube size, rejection cap,
// column count). The message says which budget.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what) : Error("budget exceeded: " + what) {}
};

class InfeasibleCorrelation : public Error {
 public:
  explicit InfeasibleCorrelation(const std::string& what)
      : Error("infeasible correlation: " + what) {}
};

// Learner collected more than k coordinates; the k-junta promise is broken.
class SizeOverflow : public Error {
 public:
  explicit SizeOverflow(const std::string& what) : Error("size overflow: " + what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
};

}  // namespace fql

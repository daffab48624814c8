#pragma once

#include <stdexcept>
#include <string>

namespace braidplan {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented precondition (bad generator index, non-bijective
// permutation, non-increasing times, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Geometry that cannot be resolved by the symbolic tie-break (e.g. two robots
// at the same point while swapping projected order).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Laurent coefficient left the range of int64_t.
class ArithmeticOverflow : public Error {
 public:
  using Error::Error;
};

// Scenario or workspace parameters that make the request impossible.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An update was attempted on a braid state that already holds a forbidden word.
class StickyViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace braidplan

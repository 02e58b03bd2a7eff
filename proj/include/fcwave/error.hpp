#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fcwave {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters: non-positive frequency, broken positive definiteness, bad order.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A mode index above the configured hard cap.
class IndexOverflow : public Error {
 public:
  IndexOverflow(unsigned index, unsigned cap)
      : Error("mode index " + std::to_string(index) + " exceeds cap " + std::to_string(cap)),
        index_(index),
        cap_(cap) {}
  unsigned index() const noexcept { return index_; }
  unsigned cap() const noexcept { return cap_; }

 private:
  unsigned index_;
  unsigned cap_;
};

// A recurrence or quadrature produced a non-finite value.
class NumericOverflow : public Error {
 public:
  NumericOverflow(const std::string& what, unsigned row, unsigned col)
      : Error(what + " at (" + std::to_string(row) + ", " + std::to_string(col) + ")"),
        row_(row),
        col_(col) {}
  explicit NumericOverflow(const std::string& what) : Error(what) {}
  unsigned row() const noexcept { return row_; }
  unsigned col() const noexcept { return col_; }

 private:
  unsigned row_ = 0;
  unsigned col_ = 0;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// The mode cap was reached before the requested probability mass was captured.
// Carries whatever was computed up to that point.
template <class Partial>
class CapReached : public Error {
 public:
  CapReached(const std::string& what, Partial partial)
      : Error(what), partial_(std::move(partial)) {}
  const Partial& partial() const noexcept { return partial_; }

 private:
  Partial partial_;
};

}  // namespace fcwave

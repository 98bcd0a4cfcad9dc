#pragma once

#include <stdexcept>
#include <string>

namespace roamp {

// Argument outside the domain of a transform or channel.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure produced a result that violates a structural
// identity (negative atom mass, negative variance, w outside [0,1], ...).
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RootFindError : public std::runtime_error {
 public:
  RootFindError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double bracket_lo() const { return lo_; }
  double bracket_hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

// The divergence-free correction is undefined for this channel.
class DegenerateChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite iterate inside an iterative algorithm.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace roamp

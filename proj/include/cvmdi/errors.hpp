#pragma once

#include <stdexcept>
#include <string>

namespace cvmdi {

/// Input outside an operation's mathematical domain (negative length, eta > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fock-space truncation too small to keep the Poisson tail below tolerance.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int required_cutoff)
      : std::runtime_error(what), required_cutoff_(required_cutoff) {}

  int required_cutoff() const noexcept { return required_cutoff_; }

 private:
  int required_cutoff_;
};

/// The model produced an unphysical covariance matrix.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A root or extremum finder could not bracket its target.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvmdi

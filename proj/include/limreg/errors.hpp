#ifndef LIMREG_ERRORS_HPP
#define LIMREG_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace limreg {

/// A mathematical precondition was violated (bad probabilities, welfare ordering, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A covariate label that the problem does not contain.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Vector lengths disagree with the number of covariates.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Least-squares design with no covariate variation.
class DegenerateDesign : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Work estimate exceeds a configured cap.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, std::uint64_t requested, std::uint64_t cap)
      : std::runtime_error(what + " (requested " + std::to_string(requested) + ", cap " +
                           std::to_string(cap) + ")"),
        requested_(requested),
        cap_(cap) {}
  [[nodiscard]] std::uint64_t requested() const { return requested_; }
  [[nodiscard]] std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t requested_;
  std::uint64_t cap_;
};

}  // namespace limreg

#endif  // LIMREG_ERRORS_HPP

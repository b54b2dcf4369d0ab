#ifndef OTTO_ERRORS_HPP
#define OTTO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace otto {

// Input outside the domain where a formula or model is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An integrator, quadrature or root finder could not meet its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace otto

#endif  // OTTO_ERRORS_HPP

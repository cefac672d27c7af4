#ifndef CDKP_ERROR_HPP
#define CDKP_ERROR_HPP

#include <stdexcept>

namespace cdkp {

/// Invalid argument or evaluation outside the domain of a function.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A denominator vanished (scale-relative) at an evaluation point.
struct PoleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A construction collapsed: zero Wronskian, annihilated generator, 1+z = 0.
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested size beyond what the symbolic routines support.
struct SizeError : std::length_error {
  using std::length_error::length_error;
};

}  // namespace cdkp

#endif  // CDKP_ERROR_HPP

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace homrate {

using cplx = std::complex<double>;

/// Rejected input: parameters outside their valid domain, malformed
/// descriptors, unsupported requests.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its accuracy target (quadrature
/// refinement disagrees, Richardson levels inconsistent, singular fit).
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace homrate

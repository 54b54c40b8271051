#pragma once

#include <vector>

#include "homrate/common.hpp"

namespace homrate {

struct PolyFitResult {
  std::vector<double> coefficients;  // one per requested power, same order
  double rms_residual = 0.0;
  double condition = 0.0;
  bool ill_conditioned = false;
};

/// Weighted least squares of y ~ sum_j c_j x^powers[j].  Abscissas are
/// rescaled to [-1, 1] internally; `condition` reports the conditioning of
/// the rescaled design matrix.  Throws validation_error when the system is
/// underdetermined.
PolyFitResult fit_polynomial(const std::vector<double>& x,
                             const std::vector<double>& y,
                             const std::vector<double>& weights,
                             const std::vector<int>& powers);

}  // namespace homrate

#pragma once

#include <vector>

#include "homrate/common.hpp"

namespace homrate {

/// Tensor-product Gauss-Hermite quadrature controls.
///
/// Nodes on each axis are centered on the midpoint of the two packet means
/// and spread so the outermost node sits `scale_sigmas` pooled standard
/// deviations out.  The convergence check repeats the integral with 1.5x
/// nodes per axis and compares.
struct QuadratureSpec {
  int nodes_per_axis = 40;
  double scale_sigmas = 8.0;
  double convergence_tol = 1e-6;
  bool convergence_check = true;

  int refined_nodes() const { return (nodes_per_axis * 3) / 2; }
  void validate() const {
    if (nodes_per_axis < 8)
      throw validation_error("QuadratureSpec: nodes_per_axis must be >= 8");
    if (scale_sigmas <= 0.0)
      throw validation_error("QuadratureSpec: scale_sigmas must be positive");
  }
};

/// Gauss-Hermite rule of order n: abscissas `x` of the weight exp(-x^2) and
/// bare-integral weights `w` (the exp(+x^2) factor already folded in), so
/// that  integral f(x) dx  ~=  sum_i w[i] f(x[i])  for near-Gaussian f.
struct GaussHermiteRule {
  std::vector<double> x;
  std::vector<double> w;
  double x_max = 0.0;
};

/// Cached Golub-Welsch construction; deterministic for a given n.
const GaussHermiteRule& gauss_hermite(int n);

}  // namespace homrate

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "homrate/common.hpp"

namespace homrate {

/// Finite-dimensional density operator: Hermitian, unit trace, positive
/// semidefinite (all checked on construction, tolerances 1e-12 / 1e-10).
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  static DensityMatrix pure(const Eigen::VectorXcd& state);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& entries() const { return m_; }

 private:
  Eigen::MatrixXcd m_;
};

/// Partially polarized beam in a fixed spatial mode:
///   rho(alpha, theta, phi) = cos^2(alpha) |Psi><Psi| + sin^2(alpha) |Psi_perp><Psi_perp|
/// with |Psi> = cos(theta)|x> + sin(theta) e^{i phi}|y> and |Psi_perp> its
/// orthogonal complement.
struct PolarizedMixture {
  double alpha = 0.0;
  double theta = 0.0;
  double phi = 0.0;

  Eigen::Vector2cd psi() const;
  Eigen::Vector2cd psi_perp() const;
  DensityMatrix density() const;
};

/// (1 - Tr[rho_a rho_b]) / 2.
double p11_mixed(const DensityMatrix& a, const DensityMatrix& b);

/// Tr[rho^2], in [1/N, 1].
double purity(const DensityMatrix& rho);

struct WeightVariationResult {
  double exact = 0.0;   // from the trace formula with renormalized weights
  double series = 0.0;  // perturbation series truncated at max_order
};

/// Variation of the coincidence probability when only the statistical
/// weights change, w_n -> (w_n + dw_n) / (1 + sum dw), eigenbasis fixed.
/// Exact value and the truncated geometric series are both returned.
WeightVariationResult delta_p11_weights(const std::vector<double>& w,
                                        const std::vector<double>& dw,
                                        int max_order);

using DensityFamily = std::function<DensityMatrix(double)>;

/// Exact Delta P11 for a DOF-parameterized family: p11(rho(f0), rho(f0+df))
/// - p11(rho(f0), rho(f0)).  Verifies Tr[delta rho] = 0 to 1e-12.
double delta_p11_dof_mixed(const DensityFamily& family, double f0, double df);

struct MixedRateResult {
  double value = 0.0;
  double first_order_check = 0.0;  // |Tr[rho drho/df]|, must be <= 1e-8
  bool degenerate = false;         // family independent of f
};

/// R_f[rho] = -(1/2) Tr[rho(f0) rho''(f0)] with rho'' by central
/// differences.  Also verifies the first-order identity Tr[rho rho'] = 0.
MixedRateResult rate_mixed(const DensityFamily& family, double f0);

/// Closed form for the weight variation of a PolarizedMixture
/// (alpha -> alpha + dalpha):  (1/4) sin(da) [sin(da) + sin(4a + da)].
double polarized_weight_delta_p11(double alpha, double dalpha);

/// Closed form for the theta variation of a PolarizedMixture:
/// (1/2) cos^2(2 alpha) sin^2(dtheta).
double polarized_theta_delta_p11(double alpha, double dtheta);

}  // namespace homrate

#pragma once

#include <vector>

#include "homrate/overlap.hpp"

namespace homrate {

enum class RateMethod { closed_form, finite_difference, derivative_form };

std::string to_string(RateMethod method);

struct RateResult {
  double value = 0.0;
  RateMethod method = RateMethod::closed_form;
  DofKind f_kind = DofKind::k03;
  double error_estimate = 0.0;
};

/// Natural scale used to pick finite-difference steps for a DOF kind:
/// sigma_n for wave-vector and width shifts, 1/sigma_n for position shifts,
/// |sigma12| for the coupling, 1 rad for angles.
double dof_scale(const GaussianWavePacket& wp, DofKind kind);

/// Finite-difference step h = max(|f|, scale) * eps^(1/4).
double fd_step(const GaussianWavePacket& wp, DofKind kind);

/// d^2/d(df)^2 of the coincidence variation of psi(f) vs psi(f + df) at
/// df = 0, via 5-point central stencils at steps {h, 2h, 4h} combined by
/// Richardson extrapolation.  Fails when the two extrapolants disagree
/// beyond ten times the expected truncation error.
RateResult rate_finite_difference(const GaussianWavePacket& wp,
                                  const DofSelector& f, Engine engine,
                                  const QuadratureSpec& quad = {});

/// (psi', psi') - |(psi, psi')|^2 with psi' formed by central differences of
/// the wave function on the quadrature nodes.
RateResult rate_derivative_form(const GaussianWavePacket& wp,
                                const DofSelector& f,
                                const QuadratureSpec& quad = {});

bool has_closed_form(const GaussianWavePacket& wp, DofKind kind);

/// Published closed forms:
///   k0n             -> 1/(2 sigma_n^2)
///   sigma_n (rho=0) -> 1/(2 sigma_n^2)
///   sigma_1,2 (rho) -> 1/(2 sigma_n^2 (1 - rho^2)^2)
///   r0n   (rho = 0) -> sigma_n^2 / 2
///   theta (rho = 0) -> 1 + (sigma1^2 - sigma2^2)/(2 k0^2) cos(2 theta)
///   phi_n (rho = 0) -> sin^2(2 theta)/4 * [same bracket]
/// Everything else (sigma12 itself, sigma3/r01/r02/angles under coupling)
/// is rejected: no closed form is published for those.
RateResult rate_closed_form(const GaussianWavePacket& wp, const DofSelector& f);

struct SeriesFit {
  std::vector<double> coefficients;  // c1 .. c_max_order
  double residual = 0.0;
  bool ill_conditioned = false;
};

/// Least-squares Taylor coefficients of df -> Delta P11 over a symmetric
/// stencil.  For pure states c1 vanishes and c2 = R_f / 2.
SeriesFit delta_p11_series(const GaussianWavePacket& wp, const DofSelector& f,
                           int max_order, Engine engine,
                           const QuadratureSpec& quad = {});

}  // namespace homrate

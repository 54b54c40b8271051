#pragma once

#include "homrate/quadrature.hpp"
#include "homrate/wavepacket.hpp"

namespace homrate {

enum class Engine { analytic, quadrature };

std::string to_string(Engine engine);
Engine engine_from_string(const std::string& name);

struct OverlapResult {
  cplx amplitude{0.0, 0.0};
  Engine engine = Engine::analytic;
  double abs_error_estimate = 0.0;
};

struct P11Result {
  double value = 0.0;
  Engine engine = Engine::analytic;
  double abs_error_estimate = 0.0;
  bool clamped = false;
};

/// Scalar product sum_s integral psi_s^a(k) conj(psi_s^b(k)) d^3k.
///
/// analytic:   exact complex Gaussian integral for the scalar part (general
///             quadratic exponent, includes sigma12 and mirrored packets)
///             times the polarization factor expanded to second order in
///             k_perp/k0.  Refuses packets with sigma_i > 0.3 |k0|.
/// quadrature: tensor Gauss-Hermite integration of the full integrand with
///             the exact polarization projections.  Reports non-convergence
///             when the refined-node pass disagrees beyond tolerance.
OverlapResult scalar_product(const GaussianWavePacket& a,
                             const GaussianWavePacket& b, Engine engine,
                             const QuadratureSpec& quad = {});

/// Coincidence probability (1 - |(psi^a, parity_invert(psi^b))|^2) / 2.
/// Values within the error estimate outside [0, 1/2] are clamped and
/// flagged; values further out raise convergence_error.
P11Result p11_pure(const GaussianWavePacket& a, const GaussianWavePacket& b,
                   Engine engine, const QuadratureSpec& quad = {});

/// Exact variation of the coincidence probability for psi^B = (psi +
/// delta_psi)/norm, in terms of Delta^2 = (delta_psi, delta_psi) and
/// alpha = (psi, delta_psi)/Delta:
///   (1/2) Delta^2 (1 - |alpha|^2) / (1 + Delta (alpha + conj(alpha)) + Delta^2).
/// Requires |alpha| < 1 and Delta >= 0.
double delta_p11_exact(double delta_norm, cplx alpha);

}  // namespace homrate

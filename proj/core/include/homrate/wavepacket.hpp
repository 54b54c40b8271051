#pragma once

#include <array>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "homrate/common.hpp"

namespace homrate {

using Vec3 = Eigen::Vector3d;

/// The 13 addressable real parameters of a GaussianWavePacket.
enum class DofKind {
  k01, k02, k03,
  sigma1, sigma2, sigma3,
  sigma12,
  r01, r02, r03,
  theta, phi1, phi2,
};

inline constexpr std::array<DofKind, 13> kAllDofKinds = {
    DofKind::k01,    DofKind::k02,  DofKind::k03,  DofKind::sigma1,
    DofKind::sigma2, DofKind::sigma3, DofKind::sigma12, DofKind::r01,
    DofKind::r02,    DofKind::r03,  DofKind::theta, DofKind::phi1,
    DofKind::phi2,
};

std::string to_string(DofKind kind);
DofKind dof_kind_from_string(const std::string& name);

/// True for theta/phi1/phi2 (dimensionless, radian-valued parameters).
bool is_angle_dof(DofKind kind);

/// Single-photon Gaussian wave packet.
///
/// The spectral amplitude is psi_s(k) = eps_s(k) * gamma(k - k0) with
///   gamma(q) = det(V)^{1/4} / pi^{3/4} * exp(-i q.r0 - q.V q / 2),
/// V^{-1} = diag(sigma1^2, sigma2^2, sigma3^2) when uncoupled, and the
/// polarization projection eps_s(k) = e_s(k).p / sqrt(1 - |p.khat|^2)
/// of the Jones vector p = {cos(theta) e^{i phi1}, sin(theta) e^{i phi2}, 0}.
///
/// When `sigma12` is set, V gains the off-diagonal entries
/// V_12 = V_21 = -1/sigma12 coupling axes 1 and 2; positive definiteness
/// requires sigma12^2 > sigma1^2 sigma2^2, i.e. |rho| < 1 with
/// rho = sigma1 sigma2 / sigma12.  The sign of sigma12 is tracked because
/// mirror reflection flips it.
struct GaussianWavePacket {
  Vec3 k0{0.0, 0.0, 1.0};
  Vec3 sigma{0.05, 0.05, 0.05};
  std::optional<double> sigma12;  // disengaged = uncoupled (diagonal V)
  Vec3 r0{0.0, 0.0, 0.0};
  double theta = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;

  /// Set by parity_invert(): the polarization projection of this packet is
  /// evaluated at {-k1, k2, k3} instead of k.  The Jones vector itself is
  /// left untouched by reflection.
  bool mirrored = false;

  double k0_norm() const { return k0.norm(); }

  /// rho = sigma1 sigma2 / sigma12; zero when uncoupled.
  double rho() const;

  /// Inverse covariance V (3x3, symmetric positive definite for valid packets).
  Eigen::Matrix3d v_matrix() const;

  /// Jones vector (p1, p2); p3 = 0 by the default-orientation convention.
  Eigen::Vector2cd jones() const;

  /// True when any sigma_i exceeds 0.3 |k0| (paraxial expansions degrade).
  bool collimation_warning() const;

  /// Throws validation_error unless all invariants hold:
  /// sigma_i > 0, sigma_i < |k0|, |k0| > 0, and |rho| < 1 when coupled
  /// (the boundary sigma12^2 = sigma1^2 sigma2^2 is rejected).
  void validate() const;
};

/// Packet whose spectral amplitude at k equals wp's at {-k1, k2, k3}:
/// k01 -> -k01, r01 -> -r01, sigma12 -> -sigma12, mirror flag toggled.
/// An involution, exact on the parameter bits.
GaussianWavePacket parity_invert(const GaussianWavePacket& wp);

struct DofSelector {
  DofKind kind = DofKind::k03;
  double value = 0.0;  // current value of the addressed parameter
};

double dof_value(const GaussianWavePacket& wp, DofKind kind);
DofSelector make_dof(const GaussianWavePacket& wp, DofKind kind);

/// wp with the selected parameter shifted by delta, revalidated.
/// Addressing sigma12 on an uncoupled packet is rejected.
GaussianWavePacket apply_dof(const GaussianWavePacket& wp, const DofSelector& f,
                             double delta);

/// Transverse basis {e1(khat), e2(khat), khat}, right handed, obtained by
/// rotating {x, y, z} along the geodesic taking z to khat.  Smooth in khat
/// everywhere except the antipode khat = -z, and exactly {x, y} on axis, so
/// eps_s(k0) equals the Jones components for the default orientation.
void transverse_basis(const Vec3& khat, Vec3& e1, Vec3& e2);

/// eps_s(k) for s in {1, 2}, including the mirror flag of wp.
/// Throws validation_error for k = 0 or k antiparallel to axis 3 (basis
/// singularity).
cplx polarization_component(const GaussianWavePacket& wp, const Vec3& k, int s);

/// gamma(k - k0), the normalized scalar Gaussian factor.
cplx gaussian_envelope(const GaussianWavePacket& wp, const Vec3& k);

/// psi_s(k) = eps_s(k) gamma(k - k0).
cplx spectral_amplitude(const GaussianWavePacket& wp, const Vec3& k, int s);

struct QuadratureSpec;

/// Mean photon energy over h_bar omega_0, evaluated by quadrature in natural
/// units (the integrand weight is |k| / k0).  Tends to 1 as sigma/k0 -> 0.
double mean_energy_ratio(const GaussianWavePacket& wp,
                         const QuadratureSpec& quad);

}  // namespace homrate

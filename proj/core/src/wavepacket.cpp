#include "homrate/wavepacket.hpp"

#include <cmath>
#include <numbers>

#include "homrate/quadrature.hpp"

namespace homrate {

namespace {

constexpr double kCollimationWarnRatio = 0.3;
// Tolerance for "k antiparallel to axis 3": 1 + khat_3 below this is treated
// as the basis singularity.
constexpr double kAntipodeTol = 1e-9;

}  // namespace

std::string to_string(DofKind kind) {
  switch (kind) {
    case DofKind::k01: return "k01";
    case DofKind::k02: return "k02";
    case DofKind::k03: return "k03";
    case DofKind::sigma1: return "sigma1";
    case DofKind::sigma2: return "sigma2";
    case DofKind::sigma3: return "sigma3";
    case DofKind::sigma12: return "sigma12";
    case DofKind::r01: return "r01";
    case DofKind::r02: return "r02";
    case DofKind::r03: return "r03";
    case DofKind::theta: return "theta";
    case DofKind::phi1: return "phi1";
    case DofKind::phi2: return "phi2";
  }
  throw validation_error("unknown DofKind");
}

DofKind dof_kind_from_string(const std::string& name) {
  for (DofKind kind : kAllDofKinds)
    if (to_string(kind) == name) return kind;
  throw validation_error("unknown DOF kind: " + name);
}

bool is_angle_dof(DofKind kind) {
  return kind == DofKind::theta || kind == DofKind::phi1 ||
         kind == DofKind::phi2;
}

double GaussianWavePacket::rho() const {
  if (!sigma12) return 0.0;
  return sigma[0] * sigma[1] / *sigma12;
}

Eigen::Matrix3d GaussianWavePacket::v_matrix() const {
  Eigen::Matrix3d v = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) v(i, i) = 1.0 / (sigma[i] * sigma[i]);
  if (sigma12) {
    v(0, 1) = -1.0 / *sigma12;
    v(1, 0) = v(0, 1);
  }
  return v;
}

Eigen::Vector2cd GaussianWavePacket::jones() const {
  using std::polar;
  return {polar(std::cos(theta), phi1), polar(std::sin(theta), phi2)};
}

bool GaussianWavePacket::collimation_warning() const {
  const double k0n = k0_norm();
  return sigma.maxCoeff() > kCollimationWarnRatio * k0n;
}

void GaussianWavePacket::validate() const {
  const double k0n = k0_norm();
  if (!(k0n > 0.0)) throw validation_error("packet: |k0| must be positive");
  for (int i = 0; i < 3; ++i) {
    if (!(sigma[i] > 0.0))
      throw validation_error("packet: sigma components must be positive");
    if (!(sigma[i] < k0n))
      throw validation_error(
          "packet: collimation requires sigma_i < |k0| (got sigma_" +
          std::to_string(i + 1) + " >= |k0|)");
  }
  if (!k0.allFinite() || !sigma.allFinite() || !r0.allFinite() ||
      !std::isfinite(theta) || !std::isfinite(phi1) || !std::isfinite(phi2))
    throw validation_error("packet: parameters must be finite");
  if (sigma12) {
    if (!std::isfinite(*sigma12) || *sigma12 == 0.0)
      throw validation_error("packet: sigma12 must be finite and nonzero");
    const double s12sq = *sigma12 * *sigma12;
    const double s1s2sq = sigma[0] * sigma[0] * sigma[1] * sigma[1];
    // Positive definiteness; the boundary |rho| = 1 is rejected.
    if (!(s12sq > s1s2sq))
      throw validation_error(
          "packet: V not positive definite, need sigma12^2 > sigma1^2 "
          "sigma2^2");
  }
}

GaussianWavePacket parity_invert(const GaussianWavePacket& wp) {
  GaussianWavePacket out = wp;
  out.k0[0] = -out.k0[0];
  out.r0[0] = -out.r0[0];
  if (out.sigma12) out.sigma12 = -*out.sigma12;
  out.mirrored = !out.mirrored;
  return out;
}

double dof_value(const GaussianWavePacket& wp, DofKind kind) {
  switch (kind) {
    case DofKind::k01: return wp.k0[0];
    case DofKind::k02: return wp.k0[1];
    case DofKind::k03: return wp.k0[2];
    case DofKind::sigma1: return wp.sigma[0];
    case DofKind::sigma2: return wp.sigma[1];
    case DofKind::sigma3: return wp.sigma[2];
    case DofKind::sigma12:
      if (!wp.sigma12)
        throw validation_error("dof_value: packet is uncoupled, sigma12 unset");
      return *wp.sigma12;
    case DofKind::r01: return wp.r0[0];
    case DofKind::r02: return wp.r0[1];
    case DofKind::r03: return wp.r0[2];
    case DofKind::theta: return wp.theta;
    case DofKind::phi1: return wp.phi1;
    case DofKind::phi2: return wp.phi2;
  }
  throw validation_error("unknown DofKind");
}

DofSelector make_dof(const GaussianWavePacket& wp, DofKind kind) {
  return DofSelector{kind, dof_value(wp, kind)};
}

GaussianWavePacket apply_dof(const GaussianWavePacket& wp,
                             const DofSelector& f, double delta) {
  GaussianWavePacket out = wp;
  if (delta == 0.0) return out;
  switch (f.kind) {
    case DofKind::k01: out.k0[0] += delta; break;
    case DofKind::k02: out.k0[1] += delta; break;
    case DofKind::k03: out.k0[2] += delta; break;
    case DofKind::sigma1: out.sigma[0] += delta; break;
    case DofKind::sigma2: out.sigma[1] += delta; break;
    case DofKind::sigma3: out.sigma[2] += delta; break;
    case DofKind::sigma12:
      if (!out.sigma12)
        throw validation_error("apply_dof: packet is uncoupled, sigma12 unset");
      *out.sigma12 += delta;
      break;
    case DofKind::r01: out.r0[0] += delta; break;
    case DofKind::r02: out.r0[1] += delta; break;
    case DofKind::r03: out.r0[2] += delta; break;
    case DofKind::theta: out.theta += delta; break;
    case DofKind::phi1: out.phi1 += delta; break;
    case DofKind::phi2: out.phi2 += delta; break;
  }
  out.validate();
  return out;
}

void transverse_basis(const Vec3& khat, Vec3& e1, Vec3& e2) {
  // Rotation of {x, y} carrying z onto khat about the axis z x khat.  Closed
  // form regular everywhere except khat = -z:
  //   e1 = (1 - kx^2/(1+kz), -kx ky/(1+kz), -kx)
  //   e2 = (-kx ky/(1+kz), 1 - ky^2/(1+kz), -ky)
  const double denom = 1.0 + khat[2];
  if (denom < kAntipodeTol)
    throw validation_error(
        "transverse_basis: k antiparallel to axis 3, basis singular");
  const double kx = khat[0], ky = khat[1];
  e1 = Vec3(1.0 - kx * kx / denom, -kx * ky / denom, -kx);
  e2 = Vec3(-kx * ky / denom, 1.0 - ky * ky / denom, -ky);
}

cplx polarization_component(const GaussianWavePacket& wp, const Vec3& k,
                            int s) {
  if (s != 1 && s != 2)
    throw validation_error("polarization_component: helicity index must be 1 or 2");
  const double kn = k.norm();
  if (!(kn > 0.0))
    throw validation_error("polarization_component: k = 0 is singular");
  Vec3 kappa = k;
  if (wp.mirrored) kappa[0] = -kappa[0];
  const Vec3 khat = kappa / kn;

  Vec3 e1, e2;
  transverse_basis(khat, e1, e2);
  const Eigen::Vector2cd p = wp.jones();

  const cplx pk = p[0] * khat[0] + p[1] * khat[1];  // p3 = 0
  const double d2 = 1.0 - std::norm(pk);
  if (d2 < 1e-30) return cplx(0.0, 0.0);  // p parallel to khat, amplitude dies

  const Vec3& e = (s == 1) ? e1 : e2;
  const cplx num = p[0] * e[0] + p[1] * e[1];
  return num / std::sqrt(d2);
}

cplx gaussian_envelope(const GaussianWavePacket& wp, const Vec3& k) {
  const Eigen::Matrix3d v = wp.v_matrix();
  const Vec3 q = k - wp.k0;
  const double norm_factor =
      std::pow(v.determinant(), 0.25) / std::pow(std::numbers::pi, 0.75);
  const double re = -0.5 * q.dot(v * q);
  const double im = -q.dot(wp.r0);
  return norm_factor * std::exp(cplx(re, im));
}

cplx spectral_amplitude(const GaussianWavePacket& wp, const Vec3& k, int s) {
  return polarization_component(wp, k, s) * gaussian_envelope(wp, k);
}

double mean_energy_ratio(const GaussianWavePacket& wp,
                         const QuadratureSpec& quad) {
  wp.validate();
  quad.validate();

  // sum_s |psi_s|^2 = |gamma|^2, so only the scalar envelope enters; the
  // integrand is |k|/k0 against the |gamma|^2 measure.
  auto integrate = [&wp](int n) {
    const GaussHermiteRule& rule = gauss_hermite(n);
    const Eigen::Matrix3d v = wp.v_matrix();
    // |gamma(q)|^2 = det(V)^{1/2}/pi^{3/2} exp(-q.Vq); per-axis scale from
    // the diagonal curvature.
    std::array<std::vector<double>, 3> nodes;
    std::array<double, 3> scale{};
    for (int axis = 0; axis < 3; ++axis) {
      const double pooled = std::sqrt(0.5 / v(axis, axis));
      scale[axis] = 8.0 * pooled / rule.x_max;  // spec scaling at default
      nodes[axis].resize(rule.x.size());
      for (std::size_t i = 0; i < rule.x.size(); ++i)
        nodes[axis][i] = wp.k0[axis] + scale[axis] * rule.x[i];
    }
    const double norm_factor =
        std::sqrt(v.determinant()) / std::pow(std::numbers::pi, 1.5);
    const double wscale = scale[0] * scale[1] * scale[2];
    double num = 0.0, den = 0.0;
    const std::size_t m = rule.x.size();
    for (std::size_t i = 0; i < m; ++i) {
      const double q1 = nodes[0][i] - wp.k0[0];
      for (std::size_t j = 0; j < m; ++j) {
        const double q2 = nodes[1][j] - wp.k0[1];
        const double vq12 = v(0, 0) * q1 * q1 + 2.0 * v(0, 1) * q1 * q2 +
                            v(1, 1) * q2 * q2;
        const double w12 = rule.w[i] * rule.w[j];
        for (std::size_t l = 0; l < m; ++l) {
          const double q3 = nodes[2][l] - wp.k0[2];
          const double dens =
              norm_factor * std::exp(-(vq12 + v(2, 2) * q3 * q3));
          const double kmag =
              std::sqrt(nodes[0][i] * nodes[0][i] + nodes[1][j] * nodes[1][j] +
                        nodes[2][l] * nodes[2][l]);
          const double weight = w12 * rule.w[l] * dens;
          num += weight * kmag;
          den += weight;
        }
      }
    }
    // den ~= 1 up to quadrature error; dividing it out removes the common
    // truncation of the normalization integral.
    return (num / den) / wp.k0_norm();
  };

  const double coarse = integrate(quad.nodes_per_axis);
  if (!quad.convergence_check) return coarse;
  const double fine = integrate(quad.refined_nodes());
  if (std::abs(fine - coarse) > quad.convergence_tol)
    throw convergence_error(
        "mean_energy_ratio: quadrature not converged, refinement shifted the "
        "result by " +
        std::to_string(std::abs(fine - coarse)));
  return fine;
}

}  // namespace homrate

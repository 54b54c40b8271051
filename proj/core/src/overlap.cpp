#include "homrate/overlap.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace homrate {

namespace {

constexpr double kAnalyticSigmaLimit = 0.3;

struct PolPacket {
  cplx p1, p2;      // Jones components
  double s;         // +1, or -1 when the projection is evaluated at {-k1,k2,k3}
};

// sum_s eps_s^a(k) conj(eps_s^b(k)) with the exact transverse-basis
// projections; mirror flags enter as the sign on k1.
cplx polarization_factor(double k1, double k2, double k3, double kn,
                         const PolPacket& a, const PolPacket& b) {
  auto eps_pair = [&](const PolPacket& p, cplx& e1p, cplx& e2p) -> bool {
    const double kx = p.s * k1 / kn;
    const double ky = k2 / kn;
    const double kz = k3 / kn;
    const double denom = 1.0 + kz;
    if (denom < 1e-12) return false;
    const cplx pk = p.p1 * kx + p.p2 * ky;
    const double d2 = 1.0 - std::norm(pk);
    if (d2 < 1e-30) return false;
    const double inv_d = 1.0 / std::sqrt(d2);
    const double e1x = 1.0 - kx * kx / denom, exy = -kx * ky / denom;
    const double e2y = 1.0 - ky * ky / denom;
    e1p = (p.p1 * e1x + p.p2 * exy) * inv_d;
    e2p = (p.p1 * exy + p.p2 * e2y) * inv_d;
    return true;
  };
  cplx a1, a2, b1, b2;
  if (!eps_pair(a, a1, a2) || !eps_pair(b, b1, b2)) return cplx(0.0, 0.0);
  return a1 * std::conj(b1) + a2 * std::conj(b2);
}

cplx quadrature_pass(const GaussianWavePacket& a, const GaussianWavePacket& b,
                     const QuadratureSpec& spec, int n) {
  const GaussHermiteRule& rule = gauss_hermite(n);
  const Eigen::Matrix3d va = a.v_matrix();
  const Eigen::Matrix3d vb = b.v_matrix();

  // Per-axis nodes centered between the packets, spread to scale_sigmas
  // pooled standard deviations of |gamma_a gamma_b|.
  std::array<std::vector<double>, 3> nodes;
  double wscale = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double pooled = 1.0 / std::sqrt(va(axis, axis) + vb(axis, axis));
    const double s = spec.scale_sigmas * pooled / rule.x_max;
    const double center = 0.5 * (a.k0[axis] + b.k0[axis]);
    nodes[axis].resize(rule.x.size());
    for (std::size_t i = 0; i < rule.x.size(); ++i)
      nodes[axis][i] = center + s * rule.x[i];
    wscale *= s;
  }

  // Per-axis pieces of the combined exponent
  //   -i qa.r0a - qa.Va qa/2 + i qb.r0b - qb.Vb qb/2;
  // the axis 1-2 coupling terms are added inside the loop.
  const std::size_t m = rule.x.size();
  std::array<std::vector<cplx>, 3> eaxis;
  std::array<std::vector<double>, 3> qa, qb;
  for (int axis = 0; axis < 3; ++axis) {
    eaxis[axis].resize(m);
    qa[axis].resize(m);
    qb[axis].resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double qai = nodes[axis][i] - a.k0[axis];
      const double qbi = nodes[axis][i] - b.k0[axis];
      qa[axis][i] = qai;
      qb[axis][i] = qbi;
      eaxis[axis][i] =
          cplx(-0.5 * (va(axis, axis) * qai * qai + vb(axis, axis) * qbi * qbi),
               -qai * a.r0[axis] + qbi * b.r0[axis]);
    }
  }
  const double va12 = va(0, 1), vb12 = vb(0, 1);

  const PolPacket pol_a{a.jones()[0], a.jones()[1], a.mirrored ? -1.0 : 1.0};
  const PolPacket pol_b{b.jones()[0], b.jones()[1], b.mirrored ? -1.0 : 1.0};

  cplx sum(0.0, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double k1 = nodes[0][i];
    for (std::size_t j = 0; j < m; ++j) {
      const double k2 = nodes[1][j];
      const double cross =
          -va12 * qa[0][i] * qa[1][j] - vb12 * qb[0][i] * qb[1][j];
      const cplx e12 = eaxis[0][i] + eaxis[1][j] + cross;
      const double w12 = rule.w[i] * rule.w[j];
      const double k12sq = k1 * k1 + k2 * k2;
      for (std::size_t l = 0; l < m; ++l) {
        const double k3 = nodes[2][l];
        const double kn = std::sqrt(k12sq + k3 * k3);
        if (!(kn > 0.0)) continue;
        const cplx envelope = std::exp(e12 + eaxis[2][l]);
        const cplx pol = polarization_factor(k1, k2, k3, kn, pol_a, pol_b);
        sum += (w12 * rule.w[l]) * envelope * pol;
      }
    }
  }

  const double prefactor = std::pow(va.determinant() * vb.determinant(), 0.25) /
                           std::pow(std::numbers::pi, 1.5);
  return prefactor * wscale * sum;
}

OverlapResult quadrature_overlap(const GaussianWavePacket& a,
                                 const GaussianWavePacket& b,
                                 const QuadratureSpec& spec) {
  const cplx coarse = quadrature_pass(a, b, spec, spec.nodes_per_axis);
  if (!spec.convergence_check)
    return {coarse, Engine::quadrature, 1e-12};
  const cplx fine = quadrature_pass(a, b, spec, spec.refined_nodes());
  const double diff = std::abs(fine - coarse);
  if (diff > spec.convergence_tol)
    throw convergence_error(
        "scalar_product: quadrature not converged, node refinement shifted "
        "the amplitude by " +
        std::to_string(diff));
  return {fine, Engine::quadrature, diff + 1e-13};
}

// Exact integral of the product of two complex Gaussian envelopes,
//   G = N_a N_b (2 pi)^{3/2} det(M)^{-1/2} exp(w.M^{-1}w / 2 + c0),
// with M = Va + Vb, w = Vb d - i (r0b - r0a), d = k0a - k0b,
// c0 = -d.Vb d / 2 + i d.r0b, plus the first and second moments of the
// integration measure needed by the polarization expansion.
struct GaussianProduct {
  cplx g;
  cplx mk11, mk22, mk12;  // <k_i k_j> / kref^2, complex in general
};

GaussianProduct scalar_gaussian_product(const GaussianWavePacket& a,
                                        const GaussianWavePacket& b,
                                        double kref) {
  const Eigen::Matrix3d va = a.v_matrix();
  const Eigen::Matrix3d vb = b.v_matrix();
  const Eigen::Matrix3d m = va + vb;
  const Eigen::Matrix3d minv = m.inverse();
  const Vec3 d = a.k0 - b.k0;

  const Eigen::Vector3cd w =
      (vb * d).cast<cplx>() - cplx(0.0, 1.0) * (b.r0 - a.r0).cast<cplx>();
  const cplx c0 = cplx(-0.5 * d.dot(vb * d), d.dot(b.r0));
  // Bilinear (not sesquilinear) quadratic form in the complex shift vector.
  const cplx quad_bilinear = 0.5 * (w.transpose() * minv.cast<cplx>() * w)(0, 0);

  const double pref = std::pow(2.0, 1.5) *
                      std::pow(va.determinant() * vb.determinant(), 0.25) /
                      std::sqrt(m.determinant());

  GaussianProduct out;
  out.g = pref * std::exp(quad_bilinear + c0);

  const Eigen::Vector3cd mu = -(minv.cast<cplx>() * w);
  const Eigen::Vector3cd mean = a.k0.cast<cplx>() + mu;
  const double kref2 = kref * kref;
  out.mk11 = (mean[0] * mean[0] + minv(0, 0)) / kref2;
  out.mk22 = (mean[1] * mean[1] + minv(1, 1)) / kref2;
  out.mk12 = (mean[0] * mean[1] + minv(0, 1)) / kref2;
  return out;
}

OverlapResult analytic_overlap(const GaussianWavePacket& a,
                               const GaussianWavePacket& b) {
  for (const auto* wp : {&a, &b}) {
    if (wp->sigma.maxCoeff() > kAnalyticSigmaLimit * wp->k0_norm())
      throw validation_error(
          "scalar_product: analytic engine requires sigma_i <= 0.3 |k0| "
          "(paraxial validity); use the quadrature engine");
  }
  const double kref = 0.5 * (a.k0_norm() + b.k0_norm());
  const GaussianProduct gp = scalar_gaussian_product(a, b, kref);

  const Eigen::Vector2cd pa = a.jones();
  const Eigen::Vector2cd pb = b.jones();
  const double sa = a.mirrored ? -1.0 : 1.0;
  const double sb = b.mirrored ? -1.0 : 1.0;

  const cplx sab = pa[0] * std::conj(pb[0]) + pa[1] * std::conj(pb[1]);
  const cplx wa = std::norm(pa[0]) * gp.mk11 + std::norm(pa[1]) * gp.mk22 +
                  2.0 * sa * std::real(pa[0] * std::conj(pa[1])) * gp.mk12;
  const cplx wb = std::norm(pb[0]) * gp.mk11 + std::norm(pb[1]) * gp.mk22 +
                  2.0 * sb * std::real(pb[0] * std::conj(pb[1])) * gp.mk12;
  const cplx p11t = pa[0] * std::conj(pb[0]);
  const cplx p22t = pa[1] * std::conj(pb[1]);
  const cplx cross = pa[0] * std::conj(pb[1]) + pa[1] * std::conj(pb[0]);

  // Second-order paraxial polarization correction; vanishes identically for
  // equal Jones vectors, which keeps the scalar closed forms exact.
  const cplx q = sab * 0.5 * (wa + wb) - (gp.mk11 * p11t + gp.mk22 * p22t) -
                 0.5 * (sa + sb) * gp.mk12 * cross;

  const cplx z = gp.g * (sab + q);

  // Truncation is fourth order in the transverse spread (widths and any
  // transverse k0 offset).
  auto t2 = [kref](const GaussianWavePacket& wp) {
    return (0.5 * (wp.sigma[0] * wp.sigma[0] + wp.sigma[1] * wp.sigma[1]) +
            wp.k0[0] * wp.k0[0] + wp.k0[1] * wp.k0[1]) /
           (kref * kref);
  };
  const double m4 = std::max(t2(a), t2(b));
  double est = 3.0 * m4 * m4 * std::max(std::abs(gp.g), std::abs(z)) + 1e-15;
  if (std::abs(z) > 1.0) est = std::max(est, (std::abs(z) - 1.0) * 1.0001);
  return {z, Engine::analytic, est};
}

}  // namespace

std::string to_string(Engine engine) {
  return engine == Engine::analytic ? "analytic" : "quadrature";
}

Engine engine_from_string(const std::string& name) {
  if (name == "analytic") return Engine::analytic;
  if (name == "quadrature") return Engine::quadrature;
  throw validation_error("unknown engine: " + name);
}

OverlapResult scalar_product(const GaussianWavePacket& a,
                             const GaussianWavePacket& b, Engine engine,
                             const QuadratureSpec& quad) {
  a.validate();
  b.validate();
  quad.validate();
  return engine == Engine::analytic ? analytic_overlap(a, b)
                                    : quadrature_overlap(a, b, quad);
}

P11Result p11_pure(const GaussianWavePacket& a, const GaussianWavePacket& b,
                   Engine engine, const QuadratureSpec& quad) {
  const OverlapResult ov = scalar_product(a, parity_invert(b), engine, quad);
  const double mag = std::abs(ov.amplitude);
  double value = 0.5 * (1.0 - mag * mag);
  const double est =
      ov.abs_error_estimate * (mag + 0.5 * ov.abs_error_estimate) + 1e-15;

  P11Result out{value, engine, est, false};
  const double slack = est + 1e-12;
  if (value < 0.0) {
    if (value < -slack)
      throw convergence_error("p11_pure: probability " + std::to_string(value) +
                              " below 0 beyond the error estimate");
    out.value = 0.0;
    out.clamped = true;
  } else if (value > 0.5) {
    if (value > 0.5 + slack)
      throw convergence_error("p11_pure: probability " + std::to_string(value) +
                              " above 1/2 beyond the error estimate");
    out.value = 0.5;
    out.clamped = true;
  }
  return out;
}

double delta_p11_exact(double delta_norm, cplx alpha) {
  if (!(delta_norm >= 0.0))
    throw validation_error("delta_p11_exact: Delta must be >= 0");
  if (delta_norm == 0.0) return 0.0;
  if (!(std::abs(alpha) < 1.0))
    throw validation_error("delta_p11_exact: |alpha| must be < 1");
  const double d2 = delta_norm * delta_norm;
  return 0.5 * d2 * (1.0 - std::norm(alpha)) /
         (1.0 + 2.0 * delta_norm * std::real(alpha) + d2);
}

}  // namespace homrate

#include "homrate/rate.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "homrate/polyfit.hpp"

namespace homrate {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Coincidence variation of psi(f) against psi(f + df) in the same arm, the
// functional whose small-shift expansion defines the rate.  The beam-splitter
// parity map plays no role here: the rate compares preparations, and the
// published closed forms (including the coupled-width one) differentiate
// exactly this quantity.
double p11_variation(const GaussianWavePacket& wp, const DofSelector& f,
                     double delta, Engine engine, const QuadratureSpec& quad) {
  const GaussianWavePacket shifted = apply_dof(wp, f, delta);
  const cplx z = scalar_product(wp, shifted, engine, quad).amplitude;
  return 0.5 * (1.0 - std::norm(z));
}

// Five-point central second derivative at step s from values sampled on the
// ladder {0, +-h, +-2h, +-4h, +-8h}; lvl selects s = h * 2^lvl.
double second_derivative(const std::array<double, 9>& p, int lvl, double h) {
  // index layout: p[0]=f(0), then (-s, +s) pairs for s = h,2h,4h,8h
  const int lo = 1 + 2 * lvl;
  const double s = h * static_cast<double>(1 << lvl);
  const double f1m = p[lo], f1p = p[lo + 1];
  const double f2m = p[lo + 2], f2p = p[lo + 3];
  return (-f2m + 16.0 * f1m - 30.0 * p[0] + 16.0 * f1p - f2p) / (12.0 * s * s);
}

struct PsiGrid {
  std::vector<Vec3> points;
  std::vector<double> weights;
};

PsiGrid build_packet_grid(const GaussianWavePacket& wp,
                          const QuadratureSpec& spec, int n) {
  const GaussHermiteRule& rule = gauss_hermite(n);
  const Eigen::Matrix3d v = wp.v_matrix();
  std::array<std::vector<double>, 3> nodes;
  double total_scale = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double pooled = 1.0 / std::sqrt(2.0 * v(axis, axis));
    const double s = spec.scale_sigmas * pooled / rule.x_max;
    total_scale *= s;
    nodes[axis].resize(rule.x.size());
    for (std::size_t i = 0; i < rule.x.size(); ++i)
      nodes[axis][i] = wp.k0[axis] + s * rule.x[i];
  }
  PsiGrid grid;
  grid.points.reserve(rule.x.size() * rule.x.size() * rule.x.size());
  grid.weights.reserve(grid.points.capacity());
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    for (std::size_t j = 0; j < rule.x.size(); ++j)
      for (std::size_t l = 0; l < rule.x.size(); ++l) {
        grid.points.emplace_back(nodes[0][i], nodes[1][j], nodes[2][l]);
        grid.weights.push_back(total_scale * rule.w[i] * rule.w[j] *
                               rule.w[l]);
      }
  return grid;
}

// Both helicity components of psi on every grid point.
void evaluate_psi(const GaussianWavePacket& wp, const PsiGrid& grid,
                  std::vector<cplx>& out1, std::vector<cplx>& out2) {
  const Eigen::Matrix3d v = wp.v_matrix();
  const double norm_factor =
      std::pow(v.determinant(), 0.25) / std::pow(std::numbers::pi, 0.75);
  const Eigen::Vector2cd p = wp.jones();
  const double smirror = wp.mirrored ? -1.0 : 1.0;
  out1.resize(grid.points.size());
  out2.resize(grid.points.size());
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const Vec3& k = grid.points[i];
    const Vec3 q = k - wp.k0;
    const cplx envelope =
        norm_factor * std::exp(cplx(-0.5 * q.dot(v * q), -q.dot(wp.r0)));
    const double kn = k.norm();
    cplx e1(0.0, 0.0), e2(0.0, 0.0);
    if (kn > 0.0) {
      const double kx = smirror * k[0] / kn, ky = k[1] / kn, kz = k[2] / kn;
      const double denom = 1.0 + kz;
      if (denom >= 1e-12) {
        const cplx pk = p[0] * kx + p[1] * ky;
        const double d2 = 1.0 - std::norm(pk);
        if (d2 >= 1e-30) {
          const double inv_d = 1.0 / std::sqrt(d2);
          const double e1x = 1.0 - kx * kx / denom, exy = -kx * ky / denom;
          const double e2y = 1.0 - ky * ky / denom;
          e1 = (p[0] * e1x + p[1] * exy) * inv_d;
          e2 = (p[0] * exy + p[1] * e2y) * inv_d;
        }
      }
    }
    out1[i] = envelope * e1;
    out2[i] = envelope * e2;
  }
}

double derivative_form_pass(const GaussianWavePacket& wp, const DofSelector& f,
                            const QuadratureSpec& spec, int n, double h) {
  const PsiGrid grid = build_packet_grid(wp, spec, n);
  const GaussianWavePacket plus = apply_dof(wp, f, h);
  const GaussianWavePacket minus = apply_dof(wp, f, -h);

  std::vector<cplx> psi1, psi2, p1, p2, m1, m2;
  evaluate_psi(wp, grid, psi1, psi2);
  evaluate_psi(plus, grid, p1, p2);
  evaluate_psi(minus, grid, m1, m2);

  const double inv2h = 0.5 / h;
  double n11 = 0.0;
  cplx n01(0.0, 0.0);
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const cplx d1 = (p1[i] - m1[i]) * inv2h;
    const cplx d2 = (p2[i] - m2[i]) * inv2h;
    const double w = grid.weights[i];
    n11 += w * (std::norm(d1) + std::norm(d2));
    n01 += w * (psi1[i] * std::conj(d1) + psi2[i] * std::conj(d2));
  }
  return n11 - std::norm(n01);
}

}  // namespace

std::string to_string(RateMethod method) {
  switch (method) {
    case RateMethod::closed_form: return "closed_form";
    case RateMethod::finite_difference: return "finite_difference";
    case RateMethod::derivative_form: return "derivative_form";
  }
  throw validation_error("unknown RateMethod");
}

double dof_scale(const GaussianWavePacket& wp, DofKind kind) {
  switch (kind) {
    case DofKind::k01:
    case DofKind::sigma1: return wp.sigma[0];
    case DofKind::k02:
    case DofKind::sigma2: return wp.sigma[1];
    case DofKind::k03:
    case DofKind::sigma3: return wp.sigma[2];
    case DofKind::sigma12:
      if (!wp.sigma12)
        throw validation_error("dof_scale: packet is uncoupled, sigma12 unset");
      return std::abs(*wp.sigma12);
    case DofKind::r01: return 1.0 / wp.sigma[0];
    case DofKind::r02: return 1.0 / wp.sigma[1];
    case DofKind::r03: return 1.0 / wp.sigma[2];
    case DofKind::theta:
    case DofKind::phi1:
    case DofKind::phi2: return 1.0;
  }
  throw validation_error("unknown DofKind");
}

double fd_step(const GaussianWavePacket& wp, DofKind kind) {
  const double scale =
      std::max(std::abs(dof_value(wp, kind)), dof_scale(wp, kind));
  return scale * std::pow(kEps, 0.25);
}

RateResult rate_finite_difference(const GaussianWavePacket& wp,
                                  const DofSelector& f, Engine engine,
                                  const QuadratureSpec& quad) {
  wp.validate();
  QuadratureSpec spec = quad;
  spec.convergence_check = false;  // accuracy is judged by Richardson levels

  // The Richardson ladder cannot see a smooth engine bias, so reject a
  // non-convergent node configuration on the unshifted overlap first.
  if (engine == Engine::quadrature && quad.convergence_check)
    scalar_product(wp, wp, engine, quad);

  double h = fd_step(wp, f.kind);
  std::array<double, 9> p{};
  for (int attempt = 0;; ++attempt) {
    try {
      p[0] = p11_variation(wp, f, 0.0, engine, spec);
      int idx = 1;
      for (int lvl = 0; lvl < 4; ++lvl) {
        const double s = h * static_cast<double>(1 << lvl);
        p[idx++] = p11_variation(wp, f, -s, engine, spec);
        p[idx++] = p11_variation(wp, f, +s, engine, spec);
      }
      break;
    } catch (const validation_error&) {
      if (attempt >= 3) throw;
      h *= 0.25;  // stencil fell out of the parameter domain, tighten it
    }
  }

  const double d_h = second_derivative(p, 0, h);
  const double d_2h = second_derivative(p, 1, h);
  const double d_4h = second_derivative(p, 2, h);
  const double r1 = (16.0 * d_h - d_2h) / 15.0;
  const double r2 = (16.0 * d_2h - d_4h) / 15.0;

  const double eps_p = engine == Engine::analytic ? 5e-16 : 1e-11;
  const double floor = 6.0 * eps_p / (h * h);
  const double expected = std::abs(d_h - d_2h) / 15.0 + floor;
  if (std::abs(r1 - r2) > 10.0 * expected)
    throw convergence_error(
        "rate_finite_difference: Richardson levels disagree (" +
        std::to_string(r1) + " vs " + std::to_string(r2) + ") for f = " +
        to_string(f.kind));

  return {r1, RateMethod::finite_difference, f.kind,
          std::abs(r1 - r2) + 1.2 * floor};
}

RateResult rate_derivative_form(const GaussianWavePacket& wp,
                                const DofSelector& f,
                                const QuadratureSpec& quad) {
  wp.validate();
  quad.validate();
  double h = std::max(std::abs(dof_value(wp, f.kind)),
                      dof_scale(wp, f.kind)) *
             std::cbrt(kEps);

  auto run = [&](int n) {
    for (int attempt = 0;; ++attempt) {
      try {
        return derivative_form_pass(wp, f, quad, n, h);
      } catch (const validation_error&) {
        if (attempt >= 3) throw;
        h *= 0.25;
      }
    }
  };

  const double coarse = run(quad.nodes_per_axis);
  if (!quad.convergence_check)
    return {coarse, RateMethod::derivative_form, f.kind, 1e-10};
  const double fine = run(quad.refined_nodes());
  const double diff = std::abs(fine - coarse);
  if (diff > quad.convergence_tol * std::max(1.0, std::abs(fine)))
    throw convergence_error(
        "rate_derivative_form: quadrature not converged for f = " +
        to_string(f.kind));
  return {fine, RateMethod::derivative_form, f.kind,
          diff + 1e-12 * std::max(1.0, std::abs(fine))};
}

bool has_closed_form(const GaussianWavePacket& wp, DofKind kind) {
  const bool coupled = wp.sigma12.has_value();
  switch (kind) {
    case DofKind::k01:
    case DofKind::k02:
    case DofKind::k03: return true;
    case DofKind::sigma1:
    case DofKind::sigma2: return true;
    case DofKind::sigma3: return !coupled;
    case DofKind::sigma12: return false;
    case DofKind::r01:
    case DofKind::r02: return !coupled;
    case DofKind::r03: return true;
    case DofKind::theta:
    case DofKind::phi1:
    case DofKind::phi2: return !coupled;
  }
  return false;
}

RateResult rate_closed_form(const GaussianWavePacket& wp,
                            const DofSelector& f) {
  wp.validate();
  if (!has_closed_form(wp, f.kind))
    throw validation_error("rate_closed_form: no published closed form for " +
                           to_string(f.kind) +
                           (wp.sigma12 ? " with coupled widths" : ""));

  auto result = [&](double value, double est = 0.0) {
    return RateResult{value, RateMethod::closed_form, f.kind, est};
  };
  const double rho = wp.rho();
  const double k0 = wp.k0_norm();
  const double spin_orbit =
      (wp.sigma[0] * wp.sigma[0] - wp.sigma[1] * wp.sigma[1]) /
      (2.0 * k0 * k0);
  // The polarization expansions truncate at fourth order in sigma/k0.
  const double pol_est = [&] {
    const double t = std::max(wp.sigma[0], wp.sigma[1]) / k0;
    return 3.0 * t * t * t * t;
  }();

  switch (f.kind) {
    case DofKind::k01: return result(0.5 / (wp.sigma[0] * wp.sigma[0]));
    case DofKind::k02: return result(0.5 / (wp.sigma[1] * wp.sigma[1]));
    case DofKind::k03: return result(0.5 / (wp.sigma[2] * wp.sigma[2]));
    case DofKind::sigma1: {
      const double c = 1.0 - rho * rho;
      return result(0.5 / (wp.sigma[0] * wp.sigma[0] * c * c));
    }
    case DofKind::sigma2: {
      const double c = 1.0 - rho * rho;
      return result(0.5 / (wp.sigma[1] * wp.sigma[1] * c * c));
    }
    case DofKind::sigma3: return result(0.5 / (wp.sigma[2] * wp.sigma[2]));
    case DofKind::r01: return result(0.5 * wp.sigma[0] * wp.sigma[0]);
    case DofKind::r02: return result(0.5 * wp.sigma[1] * wp.sigma[1]);
    case DofKind::r03: return result(0.5 * wp.sigma[2] * wp.sigma[2]);
    case DofKind::theta:
      return result(1.0 + spin_orbit * std::cos(2.0 * wp.theta), pol_est);
    case DofKind::phi1:
    case DofKind::phi2: {
      const double s2t = std::sin(2.0 * wp.theta);
      return result(0.25 * s2t * s2t *
                        (1.0 + spin_orbit * std::cos(2.0 * wp.theta)),
                    pol_est);
    }
    case DofKind::sigma12: break;
  }
  throw validation_error("rate_closed_form: unreachable");
}

SeriesFit delta_p11_series(const GaussianWavePacket& wp, const DofSelector& f,
                           int max_order, Engine engine,
                           const QuadratureSpec& quad) {
  wp.validate();
  if (max_order < 1 || max_order > 4)
    throw validation_error("delta_p11_series: max_order must be in [1, 4]");
  QuadratureSpec spec = quad;
  spec.convergence_check = false;

  const double scale =
      std::max(std::abs(dof_value(wp, f.kind)), dof_scale(wp, f.kind));

  // Pilot curvature fixes the stencil half-width at 0.05 of the dip scale;
  // that keeps the neglected high-order terms of the dip below the c1 and
  // c2 accuracy targets.
  double pilot = 0.0;
  double d0 = 0.05 * scale;
  for (int attempt = 0;; ++attempt) {
    try {
      pilot = (p11_variation(wp, f, d0, engine, spec) +
               p11_variation(wp, f, -d0, engine, spec)) /
              (d0 * d0);
      break;
    } catch (const validation_error&) {
      if (attempt >= 5) throw;
      d0 *= 0.5;
    }
  }
  double half = 0.05 / std::sqrt(std::max(pilot, 1e-12));
  half = std::min(half, 0.75 * scale);

  // odd-complete degree: the first neglected power is even and cannot
  // alias into the odd coefficients on a symmetric stencil
  const int degree = std::min(max_order + 3, 7);
  const int per_side = degree + 4;

  std::vector<double> xs, ys;
  for (int attempt = 0;; ++attempt) {
    try {
      xs.clear();
      ys.clear();
      const double step = half / per_side;
      for (int j = -per_side; j <= per_side; ++j) {
        if (j == 0) continue;
        const double d = j * step;
        xs.push_back(d);
        ys.push_back(p11_variation(wp, f, d, engine, spec));
      }
      break;
    } catch (const validation_error&) {
      if (attempt >= 5) throw;
      half *= 0.5;
    }
  }

  std::vector<int> powers(degree);
  for (int k = 0; k < degree; ++k) powers[k] = k + 1;  // Delta P(0) = 0 exactly
  const std::vector<double> weights(xs.size(), 1.0);
  const PolyFitResult fit = fit_polynomial(xs, ys, weights, powers);

  SeriesFit out;
  out.coefficients.assign(fit.coefficients.begin(),
                          fit.coefficients.begin() + max_order);
  out.residual = fit.rms_residual;
  out.ill_conditioned = fit.ill_conditioned;
  return out;
}

}  // namespace homrate

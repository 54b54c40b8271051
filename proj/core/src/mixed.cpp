#include "homrate/mixed.hpp"

#include <cmath>
#include <limits>

namespace homrate {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kEigenvalueTol = -1e-10;

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : m_(std::move(entries)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols())
    throw validation_error("DensityMatrix: entries must be square and nonempty");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale)
    throw validation_error("DensityMatrix: not Hermitian");
  const cplx tr = m_.trace();
  if (std::abs(tr - cplx(1.0, 0.0)) > kTraceTol)
    throw validation_error("DensityMatrix: trace must equal 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      0.5 * (m_ + m_.adjoint().eval()), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < kEigenvalueTol)
    throw validation_error("DensityMatrix: not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& state) {
  const double norm = state.norm();
  if (!(norm > 0.0))
    throw validation_error("DensityMatrix::pure: zero state vector");
  const Eigen::VectorXcd psi = state / norm;
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw validation_error("DensityMatrix: dim must be positive");
  return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) /
                       static_cast<double>(dim));
}

Eigen::Vector2cd PolarizedMixture::psi() const {
  return {cplx(std::cos(theta), 0.0),
          std::polar(std::sin(theta), phi)};
}

Eigen::Vector2cd PolarizedMixture::psi_perp() const {
  return {-std::polar(std::sin(theta), -phi),
          cplx(std::cos(theta), 0.0)};
}

DensityMatrix PolarizedMixture::density() const {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const Eigen::Vector2cd a = psi(), b = psi_perp();
  Eigen::MatrixXcd rho =
      ca * ca * (a * a.adjoint()) + sa * sa * (b * b.adjoint());
  return DensityMatrix(std::move(rho));
}

double p11_mixed(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    throw validation_error("p11_mixed: dimension mismatch");
  const cplx tr = (a.entries() * b.entries()).trace();
  return 0.5 * (1.0 - tr.real());
}

double purity(const DensityMatrix& rho) {
  return (rho.entries() * rho.entries()).trace().real();
}

WeightVariationResult delta_p11_weights(const std::vector<double>& w,
                                        const std::vector<double>& dw,
                                        int max_order) {
  if (w.size() != dw.size() || w.empty())
    throw validation_error("delta_p11_weights: mismatched weight vectors");
  if (max_order < 1)
    throw validation_error("delta_p11_weights: max_order must be >= 1");
  double wsum = 0.0, dsum = 0.0, wsq = 0.0, dw_w = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < -1e-14)
      throw validation_error("delta_p11_weights: weights must be nonnegative");
    if (w[i] + dw[i] < -1e-14)
      throw validation_error(
          "delta_p11_weights: perturbed weights must stay nonnegative");
    wsum += w[i];
    dsum += dw[i];
    wsq += w[i] * w[i];
    dw_w += dw[i] * w[i];
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw validation_error("delta_p11_weights: weights must sum to 1");
  if (!(1.0 + dsum > 0.0))
    throw validation_error("delta_p11_weights: 1 + sum(dw) must be positive");

  // Delta P11 = (1/2) sum_n dw_n (Tr[rho^2] - w_n) / (1 + sum dw), exactly;
  // Tr[rho^2] = sum w_n^2 in the shared eigenbasis.
  const double linear = 0.5 * (wsq * dsum - dw_w);
  WeightVariationResult out;
  out.exact = linear / (1.0 + dsum);

  // Truncated geometric series 1 - S + S^2 - ... with max_order terms.
  double series_factor = 0.0, term = 1.0;
  for (int order = 0; order < max_order; ++order) {
    series_factor += term;
    term *= -dsum;
  }
  out.series = linear * series_factor;
  return out;
}

double delta_p11_dof_mixed(const DensityFamily& family, double f0, double df) {
  const DensityMatrix base = family(f0);
  const DensityMatrix shifted = family(f0 + df);
  if (base.dim() != shifted.dim())
    throw validation_error("delta_p11_dof_mixed: family changed dimension");
  const cplx dtr = (shifted.entries() - base.entries()).trace();
  if (std::abs(dtr) > 1e-12)
    throw validation_error(
        "delta_p11_dof_mixed: Tr[delta rho] != 0, family not normalized");
  return p11_mixed(base, shifted) - p11_mixed(base, base);
}

MixedRateResult rate_mixed(const DensityFamily& family, double f0) {
  const double h =
      std::max(std::abs(f0), 1.0) *
      std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  const DensityMatrix r0 = family(f0);
  const Eigen::MatrixXcd& m0 = r0.entries();
  const Eigen::MatrixXcd mp = family(f0 + h).entries();
  const Eigen::MatrixXcd mm = family(f0 - h).entries();
  const Eigen::MatrixXcd mp2 = family(f0 + 2.0 * h).entries();
  const Eigen::MatrixXcd mm2 = family(f0 - 2.0 * h).entries();

  MixedRateResult out;
  const double motion = std::max(
      {(mp - m0).cwiseAbs().maxCoeff(), (mm - m0).cwiseAbs().maxCoeff(),
       (mp2 - m0).cwiseAbs().maxCoeff(), (mm2 - m0).cwiseAbs().maxCoeff()});
  if (motion == 0.0) {
    out.degenerate = true;  // family does not depend on f at all
    return out;
  }

  const Eigen::MatrixXcd d1 =
      (mm2 - 8.0 * mm + 8.0 * mp - mp2) / (12.0 * h);
  const Eigen::MatrixXcd d2 =
      (-mm2 + 16.0 * mm - 30.0 * m0 + 16.0 * mp - mp2) / (12.0 * h * h);

  out.first_order_check = std::abs((m0 * d1).trace());
  if (out.first_order_check > 1e-8)
    throw validation_error(
        "rate_mixed: Tr[rho drho/df] = " +
        std::to_string(out.first_order_check) +
        ", family violates the normalized-ensemble identity");
  out.value = -0.5 * (m0 * d2).trace().real();
  return out;
}

double polarized_weight_delta_p11(double alpha, double dalpha) {
  return 0.25 * std::sin(dalpha) *
         (std::sin(dalpha) + std::sin(4.0 * alpha + dalpha));
}

double polarized_theta_delta_p11(double alpha, double dtheta) {
  const double c2a = std::cos(2.0 * alpha);
  const double sd = std::sin(dtheta);
  return 0.5 * c2a * c2a * sd * sd;
}

}  // namespace homrate

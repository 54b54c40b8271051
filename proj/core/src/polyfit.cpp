#include "homrate/polyfit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace homrate {

PolyFitResult fit_polynomial(const std::vector<double>& x,
                             const std::vector<double>& y,
                             const std::vector<double>& weights,
                             const std::vector<int>& powers) {
  const std::size_t n = x.size();
  const std::size_t k = powers.size();
  if (n != y.size() || n != weights.size())
    throw validation_error("fit_polynomial: mismatched input lengths");
  if (k == 0 || n < k)
    throw validation_error("fit_polynomial: underdetermined system");

  double xmax = 0.0;
  for (double xi : x) xmax = std::max(xmax, std::abs(xi));
  const bool all_const =
      std::all_of(powers.begin(), powers.end(), [](int p) { return p == 0; });
  if (xmax == 0.0 && !all_const)
    throw validation_error("fit_polynomial: degenerate abscissas");
  if (xmax == 0.0) xmax = 1.0;

  Eigen::MatrixXd a(n, k);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sw = std::sqrt(weights[i]);
    const double xi = x[i] / xmax;
    for (std::size_t j = 0; j < k; ++j)
      a(i, j) = sw * std::pow(xi, powers[j]);
    rhs(i) = sw * y[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  PolyFitResult out;
  const auto rdiag = qr.matrixR().diagonal().head(k).cwiseAbs().eval();
  const double rmin = rdiag.minCoeff();
  const double rmax = rdiag.maxCoeff();
  out.condition = rmin > 0.0 ? rmax / rmin
                             : std::numeric_limits<double>::infinity();
  out.ill_conditioned =
      !(std::isfinite(out.condition)) || out.condition > 1e10 ||
      qr.rank() < static_cast<Eigen::Index>(k);

  const Eigen::VectorXd c = qr.solve(rhs);
  out.coefficients.resize(k);
  for (std::size_t j = 0; j < k; ++j)
    out.coefficients[j] = c(j) / std::pow(xmax, powers[j]);

  double ss = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      fit += out.coefficients[j] * std::pow(x[i], powers[j]);
    ss += weights[i] * (fit - y[i]) * (fit - y[i]);
    wsum += weights[i];
  }
  out.rms_residual = wsum > 0.0 ? std::sqrt(ss / wsum) : 0.0;
  return out;
}

}  // namespace homrate

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "homrate/mixed.hpp"
#include "homrate/overlap.hpp"
#include "homrate/polyfit.hpp"

using namespace homrate;

namespace {

DensityMatrix random_density(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = cplx(g(rng), g(rng));
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho));
}

}  // namespace

TEST_CASE("density matrix validation") {
  Eigen::MatrixXcd ok(2, 2);
  ok << 0.75, 0.1, 0.1, 0.25;
  CHECK_NOTHROW(DensityMatrix{ok});

  Eigen::MatrixXcd not_hermitian(2, 2);
  not_hermitian << 0.75, 0.1, -0.1, 0.25;
  CHECK_THROWS_AS(DensityMatrix{not_hermitian}, validation_error);

  Eigen::MatrixXcd bad_trace(2, 2);
  bad_trace << 0.8, 0.0, 0.0, 0.25;
  CHECK_THROWS_AS(DensityMatrix{bad_trace}, validation_error);

  Eigen::MatrixXcd not_psd(2, 2);
  not_psd << 1.2, 0.0, 0.0, -0.2;
  CHECK_THROWS_AS(DensityMatrix{not_psd}, validation_error);
}

TEST_CASE("p11_mixed: pure self-coincidence, maximally mixed, orthogonal") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(3);
  for (int i = 0; i < 3; ++i) v[i] = cplx(g(rng), g(rng));
  const DensityMatrix pure = DensityMatrix::pure(v);
  CHECK(p11_mixed(pure, pure) == doctest::Approx(0.0).epsilon(1e-14));

  const DensityMatrix mixed2 = DensityMatrix::maximally_mixed(2);
  CHECK(p11_mixed(mixed2, mixed2) == doctest::Approx(0.25));

  Eigen::MatrixXcd da = Eigen::MatrixXcd::Zero(2, 2);
  da(0, 0) = 1.0;
  Eigen::MatrixXcd db = Eigen::MatrixXcd::Zero(2, 2);
  db(1, 1) = 1.0;
  CHECK(p11_mixed(DensityMatrix(da), DensityMatrix(db)) ==
        doctest::Approx(0.5));

  CHECK_THROWS_AS(p11_mixed(mixed2, DensityMatrix::maximally_mixed(3)),
                  validation_error);
}

TEST_CASE("p11_mixed symmetry, bounds and the purity relation") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + static_cast<int>(rng() % 5);
    const DensityMatrix a = random_density(rng, dim);
    const DensityMatrix b = random_density(rng, dim);
    const double pab = p11_mixed(a, b);
    CHECK(std::abs(pab - p11_mixed(b, a)) < 1e-12);
    CHECK(pab >= 0.0);
    CHECK(pab <= 0.5);
    CHECK(p11_mixed(a, a) ==
          doctest::Approx(0.5 * (1.0 - purity(a))).epsilon(1e-12));
  }
}

TEST_CASE("purity: projector, maximally mixed, polarized mixture") {
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(4);
  e1[2] = 1.0;
  CHECK(purity(DensityMatrix::pure(e1)) == doctest::Approx(1.0));
  CHECK(purity(DensityMatrix::maximally_mixed(4)) == doctest::Approx(0.25));

  // direct matrix square oracle: cos^4 + sin^4
  for (double alpha : {0.0, 0.3, 0.7, 1.2}) {
    const PolarizedMixture mix{alpha, 0.4, 1.3};
    const double c = std::cos(alpha), s = std::sin(alpha);
    CHECK(purity(mix.density()) ==
          doctest::Approx(c * c * c * c + s * s * s * s).epsilon(1e-13));
  }
}

TEST_CASE("weight variation: exact formula and its special cases") {
  SUBCASE("maximally mixed weights are stationary for any dw") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int n : {2, 3, 5}) {
      std::vector<double> w(n, 1.0 / n), dw(n);
      for (double& d : dw) d = u(rng);
      const WeightVariationResult res = delta_p11_weights(w, dw, 3);
      CHECK(std::abs(res.exact) < 1e-15);
    }
  }
  SUBCASE("zero variation") {
    const WeightVariationResult res =
        delta_p11_weights({0.7, 0.3}, {0.0, 0.0}, 2);
    CHECK(res.exact == 0.0);
    CHECK(res.series == 0.0);
  }
  SUBCASE("binomial weights reproduce the polarized closed form") {
    std::mt19937_64 rng(72);
    std::uniform_real_distribution<double> ua(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> ud(-0.3, 0.3);
    for (int trial = 0; trial < 50; ++trial) {
      const double alpha = ua(rng), da = ud(rng);
      const double c0 = std::cos(alpha), s0 = std::sin(alpha);
      const double c1 = std::cos(alpha + da), s1 = std::sin(alpha + da);
      const std::vector<double> w = {c0 * c0, s0 * s0};
      const std::vector<double> dw = {c1 * c1 - c0 * c0, s1 * s1 - s0 * s0};
      const WeightVariationResult res = delta_p11_weights(w, dw, 4);
      CHECK(res.exact ==
            doctest::Approx(polarized_weight_delta_p11(alpha, da))
                .epsilon(1e-12));
      // sum(dw) = 0 here, so the series equals the exact value at any order
      CHECK(res.series == doctest::Approx(res.exact).epsilon(1e-12));
    }
  }
  SUBCASE("series converges to exact as the order grows") {
    const std::vector<double> w = {0.5, 0.3, 0.2};
    const std::vector<double> dw = {0.05, -0.02, 0.04};  // sum != 0
    const WeightVariationResult o1 = delta_p11_weights(w, dw, 1);
    const WeightVariationResult o2 = delta_p11_weights(w, dw, 2);
    const WeightVariationResult o4 = delta_p11_weights(w, dw, 4);
    CHECK(std::abs(o4.series - o4.exact) < std::abs(o2.series - o2.exact));
    CHECK(std::abs(o2.series - o2.exact) < std::abs(o1.series - o1.exact));
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(delta_p11_weights({0.6, 0.3}, {0.0, 0.0}, 2),
                    validation_error);
    CHECK_THROWS_AS(delta_p11_weights({0.5, 0.5}, {-0.6, 0.0}, 2),
                    validation_error);
  }
}

TEST_CASE("pure-state reduction: the trace linear term equals the overlap form") {
  // rank-1 rho with rho^B from the perturbed ket: the linear term
  // (Tr[rho^2] Tr[drho] - Tr[rho drho]) / 2 must equal
  // ((dpsi, dpsi) - |(psi, dpsi)|^2) / 2.
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 2 + static_cast<int>(rng() % 3);
    Eigen::VectorXcd psi(dim), dpsi(dim);
    for (int i = 0; i < dim; ++i) {
      psi[i] = cplx(g(rng), g(rng));
      dpsi[i] = 0.1 * cplx(g(rng), g(rng));
    }
    psi.normalize();
    const Eigen::MatrixXcd rho = psi * psi.adjoint();
    const Eigen::VectorXcd chi = psi + dpsi;
    const Eigen::MatrixXcd drho = chi * chi.adjoint() - rho;

    const double lhs =
        0.5 * ((rho * rho).trace().real() * drho.trace().real() -
               (rho * drho).trace().real());
    const double rhs = 0.5 * (dpsi.squaredNorm() -
                              std::norm((dpsi.adjoint() * psi)(0, 0)));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("polarized mixture: case-b variation and rate") {
  const PolarizedMixture mix{0.6, 0.35, 0.9};
  DensityFamily family = [&mix](double t) {
    return PolarizedMixture{mix.alpha, t, mix.phi}.density();
  };

  SUBCASE("closed form matches the trace computation exactly") {
    for (double dt : {-0.2, 0.01, 0.15}) {
      CHECK(delta_p11_dof_mixed(family, mix.theta, dt) ==
            doctest::Approx(polarized_theta_delta_p11(mix.alpha, dt))
                .epsilon(1e-12));
    }
  }
  SUBCASE("maximally mixed alpha = pi/4 is insensitive to theta") {
    DensityFamily fam = [](double t) {
      return PolarizedMixture{std::numbers::pi / 4.0, t, 0.3}.density();
    };
    CHECK(std::abs(delta_p11_dof_mixed(fam, 0.2, 0.3)) < 1e-15);
  }
  SUBCASE("pure limit alpha = 0 gives R_theta = 1") {
    DensityFamily fam = [](double t) {
      return PolarizedMixture{0.0, t, 0.0}.density();
    };
    const double dt = 1e-3;
    CHECK(delta_p11_dof_mixed(fam, 0.4, dt) ==
          doctest::Approx(0.5 * dt * dt).epsilon(1e-5));
    CHECK(rate_mixed(fam, 0.4).value == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("rate equals cos^2(2 alpha), first-order identity holds") {
    const MixedRateResult rate = rate_mixed(family, mix.theta);
    const double expected = std::pow(std::cos(2.0 * mix.alpha), 2);
    CHECK(rate.value == doctest::Approx(expected).epsilon(1e-6));
    CHECK(rate.first_order_check <= 1e-8);
    CHECK_FALSE(rate.degenerate);

    // oracle: quadratic fit of the exact dip
    std::vector<double> xs, ys, ws;
    for (int j = -6; j <= 6; ++j) {
      if (j == 0) continue;
      const double d = 0.01 * j;
      xs.push_back(d);
      ys.push_back(delta_p11_dof_mixed(family, mix.theta, d));
      ws.push_back(1.0);
    }
    const PolyFitResult fit = fit_polynomial(xs, ys, ws, {1, 2, 3, 4});
    CHECK(std::abs(fit.coefficients[0]) < 1e-8);  // case-b dips have no slope
    CHECK(fit.coefficients[1] ==
          doctest::Approx(0.5 * rate.value).epsilon(1e-4));
  }
  SUBCASE("degenerate family flagged, value exactly zero") {
    DensityFamily constant = [](double) {
      return PolarizedMixture{0.4, 0.7, 0.2}.density();
    };
    const MixedRateResult rate = rate_mixed(constant, 1.0);
    CHECK(rate.degenerate);
    CHECK(rate.value == 0.0);
  }
}

TEST_CASE("case-a variation: linear coefficient sin(4 alpha)/4") {
  const double alpha = 0.55;
  DensityFamily family = [alpha](double a) {
    return PolarizedMixture{a, 0.8, -0.4}.density();
  };
  std::vector<double> xs, ys, ws;
  for (int j = -8; j <= 8; ++j) {
    if (j == 0) continue;
    const double d = 0.005 * j;
    xs.push_back(d);
    ys.push_back(delta_p11_dof_mixed(family, alpha, d));
    ws.push_back(1.0);
  }
  const PolyFitResult fit = fit_polynomial(xs, ys, ws, {1, 2, 3});
  CHECK(fit.coefficients[0] ==
        doctest::Approx(0.25 * std::sin(4.0 * alpha)).epsilon(1e-6));
  CHECK(fit.coefficients[1] ==
        doctest::Approx(0.5 * std::pow(std::cos(2.0 * alpha), 2))
            .epsilon(1e-3));
}

TEST_CASE("dof variation rejects families that change dimension") {
  DensityFamily dim_change = [](double t) {
    return t < 0.05 ? DensityMatrix::maximally_mixed(2)
                    : DensityMatrix::maximally_mixed(3);
  };
  CHECK_THROWS_AS(delta_p11_dof_mixed(dim_change, 0.0, 0.1), validation_error);
}

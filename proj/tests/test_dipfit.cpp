#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "homrate/dipfit.hpp"
#include "homrate/rate.hpp"

using namespace homrate;

namespace {

const QuadratureSpec kQuad;

GaussianWavePacket fig_packet() {
  // sigma3 / k03 = 1/10
  GaussianWavePacket wp;
  wp.k0 = {0.0, 0.0, 1.0};
  wp.sigma = {0.1, 0.1, 0.1};
  return wp;
}

DipCurve synthetic_parabola(double curvature, int n, double half) {
  DipCurve curve;
  curve.f_kind = DofKind::k03;
  for (int i = 0; i < n; ++i) {
    DipSample s;
    s.delta_f = -half + 2.0 * half * i / (n - 1);
    s.p11 = 0.5 * curvature * s.delta_f * s.delta_f;
    s.error = 1e-9;
    curve.samples.push_back(s);
  }
  return curve;
}

}  // namespace

TEST_CASE("sweep validation") {
  const GaussianWavePacket wp = fig_packet();
  const DofSelector f = make_dof(wp, DofKind::k03);
  CHECK_THROWS_AS(sweep(wp, f, 0.0, 0.1, 21, Engine::analytic, kQuad),
                  validation_error);
  CHECK_THROWS_AS(sweep(wp, f, -0.1, 0.1, 1, Engine::analytic, kQuad),
                  validation_error);
}

TEST_CASE("sweep: dip center is zero and the k03 curve is the Gaussian dip") {
  const GaussianWavePacket wp = fig_packet();
  const DipCurve curve = sweep(wp, make_dof(wp, DofKind::k03), -0.3, 0.3, 61,
                               Engine::analytic, kQuad);
  REQUIRE(curve.samples.size() == 61);
  const double s3 = wp.sigma[2];
  for (const DipSample& s : curve.samples) {
    REQUIRE(s.ok);
    const double expected =
        0.5 * (1.0 - std::exp(-s.delta_f * s.delta_f / (2.0 * s3 * s3)));
    CHECK(std::abs(s.p11 - expected) < 1e-9);
  }
  // asymptote toward 1/2 for |df| >> sigma3 (the -0.9 end leaves the valid
  // domain, the +0.9 end does not)
  const DipCurve tail = sweep(wp, make_dof(wp, DofKind::k03), -0.9, 0.9, 31,
                              Engine::analytic, kQuad);
  CHECK(tail.samples.back().p11 == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("sweep: sigma3 curve matches the 1D width-overlap oracle") {
  // overlap of two widths: 2 s s' / (s^2 + s'^2), derived from the 1D
  // Gaussian product integral
  const GaussianWavePacket wp = fig_packet();
  const DipCurve curve = sweep(wp, make_dof(wp, DofKind::sigma3), -0.05, 0.05,
                               41, Engine::analytic, kQuad);
  const double s = wp.sigma[2];
  for (const DipSample& smp : curve.samples) {
    REQUIRE(smp.ok);
    const double sp = s + smp.delta_f;
    const double expected = 0.5 * (1.0 - 2.0 * s * sp / (s * s + sp * sp));
    CHECK(std::abs(smp.p11 - expected) < 1e-9);
  }
}

TEST_CASE("sweep records per-point domain violations without failing") {
  const GaussianWavePacket wp = fig_packet();
  // crossing sigma3 = 0 invalidates the left part of the range
  const DipCurve curve = sweep(wp, make_dof(wp, DofKind::sigma3), -0.2, 0.05,
                               26, Engine::analytic, kQuad);
  int bad = 0, good = 0;
  for (const DipSample& s : curve.samples) {
    if (!s.ok) {
      CHECK(std::isnan(s.p11));
      ++bad;
    } else {
      ++good;
    }
  }
  CHECK(bad > 0);
  CHECK(good > 0);
}

TEST_CASE("fit recovers the generator of an exact parabola") {
  const DipCurve curve = synthetic_parabola(0.3, 41, 1.0);
  const DipCurve fitted = fit_parabola(curve, 0.8);
  CHECK(fitted.curvature == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(std::abs(fitted.intercept) < 1e-12);
  CHECK(std::abs(fitted.slope) < 1e-12);
  CHECK(fitted.fit_residual < 1e-12);
}

TEST_CASE("fit validation: needs five in-window samples") {
  const DipCurve curve = synthetic_parabola(0.3, 41, 1.0);
  CHECK_THROWS_AS(fit_parabola(curve, 1e-3), validation_error);
  CHECK_THROWS_AS(fit_parabola(curve, -1.0), validation_error);
}

TEST_CASE("narrow-window fit extracts the k03 rate within 1%") {
  const GaussianWavePacket wp = fig_packet();
  const double rate =
      rate_closed_form(wp, make_dof(wp, DofKind::k03)).value;  // 50
  const DipCurve curve = sweep(wp, make_dof(wp, DofKind::k03), -0.05, 0.05,
                               201, Engine::analytic, kQuad);
  const double window = 0.1 / std::sqrt(rate);
  const DipCurve fitted = fit_parabola(curve, window);
  CHECK(fitted.curvature == doctest::Approx(rate).epsilon(0.01));
  // dip symmetry: the linear coefficient is tiny against c * window
  CHECK(std::abs(fitted.slope) <= 1e-6 * fitted.curvature * window);
}

TEST_CASE("wide window biases the curvature low and inflates the residual") {
  const GaussianWavePacket wp = fig_packet();
  const double rate = rate_closed_form(wp, make_dof(wp, DofKind::k03)).value;
  const DipCurve curve = sweep(wp, make_dof(wp, DofKind::k03), -0.12, 0.12,
                               241, Engine::analytic, kQuad);
  const DipCurve narrow = fit_parabola(curve, 0.1 / std::sqrt(rate));
  const DipCurve wide = fit_parabola(curve, wp.sigma[2]);  // 10x too wide
  CHECK(wide.curvature < 0.9 * rate);  // quartic term drags the estimate down
  CHECK(wide.fit_residual > 100.0 * narrow.fit_residual);
}

TEST_CASE("auto window reproduces closed-form rates within 1%") {
  // includes transverse kinds, where the reflection parity acts on the
  // swept parameter itself
  const GaussianWavePacket wp = fig_packet();
  for (DofKind kind : {DofKind::k01, DofKind::r02, DofKind::k03, DofKind::r03,
                       DofKind::sigma1, DofKind::sigma3}) {
    CAPTURE(to_string(kind));
    const double rate = rate_closed_form(wp, make_dof(wp, kind)).value;
    const double span = 2.0 / std::sqrt(rate);
    const DipCurve curve = sweep(wp, make_dof(wp, kind), -span, span, 401,
                                 Engine::analytic, kQuad);
    const DipCurve fitted = fit_parabola_auto(curve);
    CHECK(fitted.curvature == doctest::Approx(rate).epsilon(0.01));
  }
}

TEST_CASE("halving the window moves the curvature within the quartic bound") {
  const GaussianWavePacket wp = fig_packet();
  const double rate = rate_closed_form(wp, make_dof(wp, DofKind::k03)).value;
  const DipCurve curve = sweep(wp, make_dof(wp, DofKind::k03), -0.05, 0.05,
                               401, Engine::analytic, kQuad);
  const double w = 0.2 / std::sqrt(rate);
  const DipCurve full = fit_parabola(curve, w);
  const DipCurve half = fit_parabola(curve, 0.5 * w);
  // quartic bias scale: residual ~ |c4| w^4 terms; curvature shift ~ c4 w^2.
  const double bias_bound = 40.0 * full.fit_residual / (w * w);
  CHECK(std::abs(half.curvature - full.curvature) < bias_bound);
}

TEST_CASE("csv round trip preserves samples, including failed points") {
  const GaussianWavePacket wp = fig_packet();
  const DipCurve curve = sweep(wp, make_dof(wp, DofKind::sigma3), -0.2, 0.05,
                               26, Engine::analytic, kQuad);
  std::ostringstream os;
  write_csv(curve, os);
  const std::string text = os.str();
  CHECK(text.rfind("delta_f,p11,err\n", 0) == 0);

  std::istringstream is(text);
  const DipCurve back = read_csv(is);
  REQUIRE(back.samples.size() == curve.samples.size());
  for (std::size_t i = 0; i < back.samples.size(); ++i) {
    CHECK(back.samples[i].delta_f == curve.samples[i].delta_f);
    CHECK(back.samples[i].ok == curve.samples[i].ok);
    if (curve.samples[i].ok)
      CHECK(back.samples[i].p11 == curve.samples[i].p11);
  }

  std::istringstream bad("p11,delta\n1,2\n");
  CHECK_THROWS_AS(read_csv(bad), validation_error);
}

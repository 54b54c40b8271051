#include "homrate/dipfit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "homrate/polyfit.hpp"

namespace homrate {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<const DipSample*> in_window(const DipCurve& curve, double window) {
  std::vector<const DipSample*> picked;
  for (const DipSample& s : curve.samples)
    if (s.ok && std::abs(s.delta_f) <= window) picked.push_back(&s);
  return picked;
}

}  // namespace

DipCurve sweep(const GaussianWavePacket& wp, const DofSelector& f, double lo,
               double hi, int n_points, Engine engine,
               const QuadratureSpec& quad) {
  wp.validate();
  if (!(lo < 0.0 && 0.0 < hi))
    throw validation_error("sweep: range must straddle zero (lo < 0 < hi)");
  if (n_points < 11)
    throw validation_error("sweep: need at least 11 points");

  DipCurve curve;
  curve.f_kind = f.kind;
  curve.samples.reserve(n_points);
  const double step = (hi - lo) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) {
    DipSample s;
    s.delta_f = lo + i * step;
    try {
      const GaussianWavePacket shifted = apply_dof(wp, f, s.delta_f);
      const P11Result p = p11_pure(wp, shifted, engine, quad);
      s.p11 = p.value;
      s.error = p.abs_error_estimate;
    } catch (const validation_error&) {
      s.ok = false;
      s.p11 = kNan;
      s.error = kNan;
    } catch (const convergence_error&) {
      s.ok = false;
      s.p11 = kNan;
      s.error = kNan;
    }
    curve.samples.push_back(s);
  }
  return curve;
}

DipCurve fit_parabola(DipCurve curve, double window, bool even_only) {
  if (!(window > 0.0))
    throw validation_error("fit_parabola: window must be positive");
  const auto picked = in_window(curve, window);
  if (picked.size() < 5)
    throw validation_error("fit_parabola: fewer than 5 valid samples inside "
                           "the window");

  std::vector<double> xs, ys, ws;
  xs.reserve(picked.size());
  for (const DipSample* s : picked) {
    xs.push_back(s->delta_f);
    ys.push_back(s->p11);
    const double e = s->error + 1e-12;
    ws.push_back(1.0 / (e * e));
  }
  const std::vector<int> powers =
      even_only ? std::vector<int>{0, 2} : std::vector<int>{0, 1, 2};
  const PolyFitResult fit = fit_polynomial(xs, ys, ws, powers);
  if (fit.ill_conditioned)
    throw convergence_error("fit_parabola: normal equations ill conditioned");

  curve.fitted = true;
  curve.fit_window = window;
  curve.intercept = fit.coefficients[0];
  curve.slope = even_only ? 0.0 : fit.coefficients[1];
  curve.curvature = 2.0 * fit.coefficients[even_only ? 1 : 2];
  curve.fit_residual = fit.rms_residual;
  return curve;
}

DipCurve fit_parabola_auto(DipCurve curve, bool even_only) {
  // Pilot curvature from a coarse 3-point stencil on the sampled curve.
  const DipSample* center = nullptr;
  double max_abs = 0.0;
  for (const DipSample& s : curve.samples)
    if (s.ok) {
      if (!center || std::abs(s.delta_f) < std::abs(center->delta_f))
        center = &s;
      max_abs = std::max(max_abs, std::abs(s.delta_f));
    }
  if (!center) throw validation_error("fit_parabola_auto: no valid samples");

  auto nearest = [&curve](double target) -> const DipSample* {
    const DipSample* best = nullptr;
    for (const DipSample& s : curve.samples)
      if (s.ok && (!best || std::abs(s.delta_f - target) <
                                std::abs(best->delta_f - target)))
        best = &s;
    return best;
  };
  const double probe = 0.5 * max_abs;
  const DipSample* plus = nearest(probe);
  const DipSample* minus = nearest(-probe);

  double window = 0.25 * max_abs;  // fallback when the pilot is unusable
  const double spread = plus->delta_f - minus->delta_f;
  if (spread > 0.0) {
    const double pilot = 2.0 *
                         (plus->p11 + minus->p11 - 2.0 * center->p11) /
                         (0.5 * spread * spread);
    if (pilot > 0.0) window = 0.1 / std::sqrt(pilot);
  }

  auto clamp_window = [&curve, max_abs](double w) {
    // keep at least 5 valid samples inside
    std::vector<double> mags;
    for (const DipSample& s : curve.samples)
      if (s.ok) mags.push_back(std::abs(s.delta_f));
    std::sort(mags.begin(), mags.end());
    const double min_w = mags.size() >= 5 ? mags[4] * (1.0 + 1e-12) : max_abs;
    return std::clamp(w, min_w, max_abs);
  };

  DipCurve fitted = fit_parabola(curve, clamp_window(window), even_only);
  // One refinement with the fitted curvature.
  if (fitted.curvature > 0.0) {
    const double refined = clamp_window(0.1 / std::sqrt(fitted.curvature));
    fitted = fit_parabola(std::move(fitted), refined, even_only);
  }
  return fitted;
}

void write_csv(const DipCurve& curve, std::ostream& os) {
  os << "delta_f,p11,err\n";
  std::ostringstream line;
  line.precision(17);
  for (const DipSample& s : curve.samples) {
    line.str("");
    line << s.delta_f << ',' << s.p11 << ',' << s.error << '\n';
    os << line.str();
  }
}

DipCurve read_csv(std::istream& is) {
  DipCurve curve;
  std::string line;
  if (!std::getline(is, line))
    throw validation_error("read_csv: empty input");
  if (line.rfind("delta_f,p11,err", 0) != 0)
    throw validation_error("read_csv: expected header 'delta_f,p11,err'");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    DipSample s;
    try {
      if (!std::getline(row, field, ',')) throw std::invalid_argument(line);
      s.delta_f = std::stod(field);
      if (!std::getline(row, field, ',')) throw std::invalid_argument(line);
      s.p11 = std::stod(field);
      if (!std::getline(row, field, ',')) throw std::invalid_argument(line);
      s.error = std::stod(field);
    } catch (const std::exception&) {
      throw validation_error("read_csv: malformed row: " + line);
    }
    s.ok = std::isfinite(s.p11);
    curve.samples.push_back(s);
  }
  std::sort(curve.samples.begin(), curve.samples.end(),
            [](const DipSample& a, const DipSample& b) {
              return a.delta_f < b.delta_f;
            });
  return curve;
}

}  // namespace homrate

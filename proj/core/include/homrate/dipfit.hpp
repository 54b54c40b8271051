#pragma once

#include <iosfwd>
#include <vector>

#include "homrate/overlap.hpp"

namespace homrate {

struct DipSample {
  double delta_f = 0.0;
  double p11 = 0.0;
  double error = 0.0;
  bool ok = true;  // false: the shifted parameter left its valid domain
};

/// Sampled coincidence dip P11 vs df, with parabolic-fit metadata once
/// fitted: p11 ~ intercept + slope * df + (curvature/2) * df^2 on
/// |df| <= fit_window.  `curvature` is the R_f estimate.
struct DipCurve {
  DofKind f_kind = DofKind::k03;
  std::vector<DipSample> samples;  // sorted by delta_f

  bool fitted = false;
  double fit_window = 0.0;
  double intercept = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
  double fit_residual = 0.0;
};

/// Samples p11_pure(wp, apply_dof(wp, f, df)) over n_points equally spaced
/// df in [lo, hi].  Requires lo < 0 < hi and n_points >= 11.  Domain
/// violations are recorded per point, never fatally.
DipCurve sweep(const GaussianWavePacket& wp, const DofSelector& f, double lo,
               double hi, int n_points, Engine engine,
               const QuadratureSpec& quad = {});

/// Weighted least squares on |df| <= window (at least 5 valid samples).
/// even_only drops the linear term; keep it off to detect genuine linear
/// components such as mixed-state weight variations.
DipCurve fit_parabola(DipCurve curve, double window, bool even_only = false);

/// Window chosen as 0.1/sqrt(R) from a coarse pilot estimate, then refined
/// once with the fitted curvature.
DipCurve fit_parabola_auto(DipCurve curve, bool even_only = false);

/// CSV with header "delta_f,p11,err"; failed samples carry nan fields.
void write_csv(const DipCurve& curve, std::ostream& os);
DipCurve read_csv(std::istream& is);

}  // namespace homrate

#pragma once

#include <optional>
#include <string>
#include <variant>

#include "homrate/dipfit.hpp"
#include "homrate/mixed.hpp"
#include "homrate/wavepacket.hpp"

namespace homrate {

/// Packet descriptor:
/// { "k0": [0,0,1], "sigma": [s1,s2,s3], "sigma12": null, "r0": [0,0,0],
///   "theta": 0, "phi1": 0, "phi2": 0 }
/// All fields required except sigma12 (null or absent = uncoupled).
/// With degrees = true, angle fields are converted from degrees on input.
GaussianWavePacket packet_from_json(const std::string& text,
                                    bool degrees = false);
std::string packet_to_json(const GaussianWavePacket& wp);

/// Density descriptor: either explicit entries (row-major, [re, im] pairs)
///   { "entries": [[[1,0],[0,0]], [[0,0],[0,0]]] }
/// or a polarized mixture
///   { "alpha": a, "theta": t, "phi": p }.
std::variant<DensityMatrix, PolarizedMixture> density_from_json(
    const std::string& text, bool degrees = false);

std::string density_to_json(const DensityMatrix& rho);

/// True when the JSON object looks like a packet descriptor ("k0" present)
/// rather than a density descriptor.
bool looks_like_packet(const std::string& text);

/// Fit summary {f_kind, window, a, b, curvature, residual}.
std::string fit_summary_json(const DipCurve& curve);

}  // namespace homrate

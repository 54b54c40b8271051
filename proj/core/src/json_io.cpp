#include "homrate/json_io.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace homrate {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    throw validation_error(std::string("JSON parse error: ") + err.what());
  }
}

Vec3 vec3_field(const json& j, const std::string& key) {
  if (!j.contains(key))
    throw validation_error("missing required field '" + key + "'");
  const json& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 3)
    throw validation_error("field '" + key + "' must be a 3-element array");
  return Vec3(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>());
}

double number_field(const json& j, const std::string& key) {
  if (!j.contains(key))
    throw validation_error("missing required field '" + key + "'");
  if (!j.at(key).is_number())
    throw validation_error("field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

GaussianWavePacket packet_from_json(const std::string& text, bool degrees) {
  const json j = parse(text);
  if (!j.is_object())
    throw validation_error("packet descriptor must be a JSON object");
  GaussianWavePacket wp;
  wp.k0 = vec3_field(j, "k0");
  wp.sigma = vec3_field(j, "sigma");
  wp.r0 = vec3_field(j, "r0");
  wp.theta = number_field(j, "theta");
  wp.phi1 = number_field(j, "phi1");
  wp.phi2 = number_field(j, "phi2");
  if (j.contains("sigma12") && !j.at("sigma12").is_null())
    wp.sigma12 = j.at("sigma12").get<double>();
  if (degrees) {
    wp.theta *= kDegToRad;
    wp.phi1 *= kDegToRad;
    wp.phi2 *= kDegToRad;
  }
  wp.validate();
  return wp;
}

std::string packet_to_json(const GaussianWavePacket& wp) {
  json j;
  j["k0"] = {wp.k0[0], wp.k0[1], wp.k0[2]};
  j["sigma"] = {wp.sigma[0], wp.sigma[1], wp.sigma[2]};
  j["sigma12"] = wp.sigma12 ? json(*wp.sigma12) : json(nullptr);
  j["r0"] = {wp.r0[0], wp.r0[1], wp.r0[2]};
  j["theta"] = wp.theta;
  j["phi1"] = wp.phi1;
  j["phi2"] = wp.phi2;
  return j.dump(2);
}

std::variant<DensityMatrix, PolarizedMixture> density_from_json(
    const std::string& text, bool degrees) {
  const json j = parse(text);
  if (!j.is_object())
    throw validation_error("density descriptor must be a JSON object");

  if (j.contains("entries")) {
    const json& rows = j.at("entries");
    if (!rows.is_array() || rows.empty())
      throw validation_error("'entries' must be a nonempty array of rows");
    const std::size_t n = rows.size();
    Eigen::MatrixXcd m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      const json& row = rows[r];
      if (!row.is_array() || row.size() != n)
        throw validation_error("'entries' must be square");
      for (std::size_t c = 0; c < n; ++c) {
        const json& cell = row[c];
        if (!cell.is_array() || cell.size() != 2)
          throw validation_error("matrix entries must be [re, im] pairs");
        m(r, c) = cplx(cell[0].get<double>(), cell[1].get<double>());
      }
    }
    return DensityMatrix(std::move(m));
  }

  if (j.contains("alpha")) {
    PolarizedMixture mix;
    mix.alpha = number_field(j, "alpha");
    mix.theta = number_field(j, "theta");
    mix.phi = number_field(j, "phi");
    if (degrees) {
      mix.alpha *= kDegToRad;
      mix.theta *= kDegToRad;
      mix.phi *= kDegToRad;
    }
    return mix;
  }

  throw validation_error(
      "density descriptor needs either 'entries' or a polarized-mixture "
      "{alpha, theta, phi}");
}

std::string density_to_json(const DensityMatrix& rho) {
  json rows = json::array();
  for (int r = 0; r < rho.dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < rho.dim(); ++c) {
      const cplx v = rho.entries()(r, c);
      row.push_back({v.real(), v.imag()});
    }
    rows.push_back(row);
  }
  json j;
  j["entries"] = rows;
  return j.dump(2);
}

bool looks_like_packet(const std::string& text) {
  const json j = parse(text);
  return j.is_object() && j.contains("k0");
}

std::string fit_summary_json(const DipCurve& curve) {
  json j;
  j["f_kind"] = to_string(curve.f_kind);
  j["window"] = curve.fit_window;
  j["a"] = curve.intercept;
  j["b"] = curve.slope;
  j["curvature"] = curve.curvature;
  j["residual"] = curve.fit_residual;
  return j.dump(2);
}

}  // namespace homrate

// Command-line frontend for Hong-Ou-Mandel coincidence and
// rate-of-distinguishability computations.
//
// Subcommands: p11, sweep, rate, table1, mixed, fit.
// Exit codes: 0 success, 2 validation, 3 convergence, 4 tolerance (--strict).

#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "homrate/dipfit.hpp"
#include "homrate/json_io.hpp"
#include "homrate/mixed.hpp"
#include "homrate/overlap.hpp"
#include "homrate/rate.hpp"

namespace {

using nlohmann::json;
using namespace homrate;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitTolerance = 4;

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct CommonOptions {
  std::string engine = "analytic";
  int nodes = 40;
  std::string output;
  bool degrees = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_engine = true) {
  if (with_engine)
    cmd->add_option("--engine", opts.engine,
                    "Overlap engine: analytic, quadrature or both")
        ->check(CLI::IsMember({"analytic", "quadrature", "both"}));
  cmd->add_option("--nodes", opts.nodes, "Quadrature nodes per axis (>= 8)");
  cmd->add_option("--output", opts.output,
                  "Write the report to this file instead of stdout");
  cmd->add_flag("--degrees", opts.degrees,
                "Interpret angles in input files and ranges as degrees");
}

QuadratureSpec make_quad(const CommonOptions& opts) {
  QuadratureSpec spec;
  spec.nodes_per_axis = opts.nodes;
  return spec;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const CommonOptions& opts, const std::string& text) {
  if (opts.output.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(opts.output);
  if (!out) throw validation_error("cannot write file: " + opts.output);
  out << text << '\n';
}

DensityMatrix resolve_density(const std::string& text, bool degrees) {
  auto parsed = density_from_json(text, degrees);
  if (std::holds_alternative<DensityMatrix>(parsed))
    return std::get<DensityMatrix>(std::move(parsed));
  return std::get<PolarizedMixture>(parsed).density();
}

json p11_report(const P11Result& result) {
  json j;
  j["p11"] = result.value;
  j["engine"] = to_string(result.engine);
  j["abs_error_estimate"] = result.abs_error_estimate;
  j["clamped"] = result.clamped;
  return j;
}

int cmd_p11(const CommonOptions& opts, const std::string& state_a,
            const std::string& state_b) {
  const std::string text_a = read_file(state_a);
  const std::string text_b = read_file(state_b);
  const bool packet_a = looks_like_packet(text_a);
  const bool packet_b = looks_like_packet(text_b);
  if (packet_a != packet_b)
    throw validation_error(
        "p11: states must both be packets or both be density matrices");

  json report;
  if (packet_a) {
    const GaussianWavePacket a = packet_from_json(text_a, opts.degrees);
    const GaussianWavePacket b = packet_from_json(text_b, opts.degrees);
    const QuadratureSpec quad = make_quad(opts);
    if (opts.engine == "both") {
      const P11Result pa = p11_pure(a, b, Engine::analytic, quad);
      const P11Result pq = p11_pure(a, b, Engine::quadrature, quad);
      report["analytic"] = p11_report(pa);
      report["quadrature"] = p11_report(pq);
      report["difference"] = std::abs(pa.value - pq.value);
    } else {
      report = p11_report(p11_pure(a, b, engine_from_string(opts.engine), quad));
    }
  } else {
    const DensityMatrix rho_a = resolve_density(text_a, opts.degrees);
    const DensityMatrix rho_b = resolve_density(text_b, opts.degrees);
    report["p11"] = p11_mixed(rho_a, rho_b);
    report["engine"] = "trace";
    report["purity_a"] = purity(rho_a);
    report["purity_b"] = purity(rho_b);
  }
  emit(opts, report.dump(2));
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opts, const std::string& packet_path,
              const std::string& dof_name, double lo, double hi, int points) {
  const GaussianWavePacket wp =
      packet_from_json(read_file(packet_path), opts.degrees);
  const DofKind kind = dof_kind_from_string(dof_name);
  double lo_v = lo, hi_v = hi;
  if (opts.degrees && is_angle_dof(kind)) {
    lo_v *= kDegToRad;
    hi_v *= kDegToRad;
  }
  if (opts.engine == "both")
    throw validation_error("sweep: pick one engine (analytic or quadrature)");
  const DipCurve curve =
      sweep(wp, make_dof(wp, kind), lo_v, hi_v, points,
            engine_from_string(opts.engine), make_quad(opts));
  if (opts.output.empty()) {
    write_csv(curve, std::cout);
  } else {
    std::ofstream out(opts.output);
    if (!out) throw validation_error("cannot write file: " + opts.output);
    write_csv(curve, out);
  }
  return kExitOk;
}

int cmd_rate(const CommonOptions& opts, const std::string& packet_path,
             const std::string& dof_name, const std::string& method) {
  const GaussianWavePacket wp =
      packet_from_json(read_file(packet_path), opts.degrees);
  const DofSelector f = make_dof(wp, dof_kind_from_string(dof_name));
  const QuadratureSpec quad = make_quad(opts);
  if (opts.engine == "both")
    throw validation_error("rate: pick one engine (analytic or quadrature)");
  const Engine engine = engine_from_string(opts.engine);

  auto rate_json = [](const RateResult& r) {
    json j;
    j["value"] = r.value;
    j["method"] = to_string(r.method);
    j["error_estimate"] = r.error_estimate;
    return j;
  };

  json report;
  report["f_kind"] = dof_name;
  report["engine"] = opts.engine;
  if (method == "closed_form" || method == "all") {
    if (has_closed_form(wp, f.kind))
      report["closed_form"] = rate_json(rate_closed_form(wp, f));
    else if (method == "all")
      report["closed_form"] = nullptr;
    else
      throw validation_error("rate: no closed form for " + dof_name);
  }
  if (method == "finite_difference" || method == "all")
    report["finite_difference"] =
        rate_json(rate_finite_difference(wp, f, engine, quad));
  if (method == "derivative_form" || method == "all")
    report["derivative_form"] = rate_json(rate_derivative_form(wp, f, quad));
  emit(opts, report.dump(2));
  return kExitOk;
}

int cmd_table1(const CommonOptions& opts, const std::string& packet_path,
               bool strict, std::optional<double> tol_override) {
  const GaussianWavePacket wp =
      packet_from_json(read_file(packet_path), opts.degrees);
  if (opts.engine == "both")
    throw validation_error("table1: pick one engine (analytic or quadrature)");
  const Engine engine = engine_from_string(opts.engine);
  const QuadratureSpec quad = make_quad(opts);
  const double tol = tol_override.value_or(
      engine == Engine::analytic ? 1e-6 : 1e-3);

  const std::array<std::array<DofKind, 3>, 3> rows = {{
      {DofKind::k01, DofKind::k02, DofKind::k03},
      {DofKind::sigma1, DofKind::sigma2, DofKind::sigma3},
      {DofKind::r01, DofKind::r02, DofKind::r03},
  }};

  json cells = json::array();
  bool all_ok = true;
  std::array<std::array<double, 3>, 2> fd_kr{};  // [k0n|r0n][n] for products
  for (int row = 0; row < 3; ++row) {
    for (int n = 0; n < 3; ++n) {
      const DofKind kind = rows[row][n];
      const DofSelector f = make_dof(wp, kind);
      json cell;
      cell["dof"] = to_string(kind);
      cell["n"] = n + 1;
      cell["coupled"] = wp.sigma12.has_value() &&
                        (kind == DofKind::sigma1 || kind == DofKind::sigma2);
      const RateResult fd = rate_finite_difference(wp, f, engine, quad);
      cell["finite_difference"] = fd.value;
      if (row == 0) fd_kr[0][n] = fd.value;
      if (row == 2) fd_kr[1][n] = fd.value;
      if (has_closed_form(wp, kind)) {
        const RateResult cf = rate_closed_form(wp, f);
        cell["closed_form"] = cf.value;
        const double rel =
            std::abs(fd.value - cf.value) / std::max(1e-300, std::abs(cf.value));
        cell["relative_deviation"] = rel;
        cell["within_tolerance"] = rel <= tol;
        all_ok = all_ok && rel <= tol;
      } else {
        cell["closed_form"] = nullptr;
      }
      cells.push_back(cell);
    }
  }

  json products = json::array();
  for (int n = 0; n < 3; ++n) {
    json prod;
    prod["n"] = n + 1;
    prod["finite_difference"] = fd_kr[0][n] * fd_kr[1][n];
    const DofKind kk = rows[0][n], rk = rows[2][n];
    if (has_closed_form(wp, kk) && has_closed_form(wp, rk))
      prod["closed_form"] = rate_closed_form(wp, make_dof(wp, kk)).value *
                            rate_closed_form(wp, make_dof(wp, rk)).value;
    else
      prod["closed_form"] = nullptr;
    products.push_back(prod);
  }

  json report;
  report["engine"] = opts.engine;
  report["tolerance"] = tol;
  report["k0_norm"] = wp.k0_norm();
  report["cells"] = cells;
  report["products"] = products;
  report["pass"] = all_ok;
  emit(opts, report.dump(2));
  if (strict && !all_ok) return kExitTolerance;
  return kExitOk;
}

int cmd_mixed(const CommonOptions& opts, const std::string& family_path,
              const std::string& vary, double delta) {
  const std::string text = read_file(family_path);
  const auto parsed = density_from_json(text, opts.degrees);
  if (!std::holds_alternative<PolarizedMixture>(parsed))
    throw validation_error(
        "mixed: the family descriptor must be a polarized mixture "
        "{alpha, theta, phi}");
  const PolarizedMixture mix = std::get<PolarizedMixture>(parsed);
  double dv = delta;
  if (opts.degrees) dv *= kDegToRad;

  json report;
  report["alpha"] = mix.alpha;
  report["theta"] = mix.theta;
  report["phi"] = mix.phi;
  report["vary"] = vary;
  report["delta"] = dv;
  report["purity"] = purity(mix.density());

  if (vary == "alpha") {
    // weight variation, eigenbasis fixed
    DensityFamily family = [&mix](double a) {
      return PolarizedMixture{a, mix.theta, mix.phi}.density();
    };
    report["delta_p11"] = delta_p11_dof_mixed(family, mix.alpha, dv);
    report["closed_form"] = polarized_weight_delta_p11(mix.alpha, dv);
    report["first_order_rate"] = 0.25 * std::sin(4.0 * mix.alpha);
  } else if (vary == "theta") {
    DensityFamily family = [&mix](double t) {
      return PolarizedMixture{mix.alpha, t, mix.phi}.density();
    };
    report["delta_p11"] = delta_p11_dof_mixed(family, mix.theta, dv);
    report["closed_form"] = polarized_theta_delta_p11(mix.alpha, dv);
    const MixedRateResult rate = rate_mixed(family, mix.theta);
    report["rate"] = rate.value;
    report["first_order_check"] = rate.first_order_check;
  } else {
    throw validation_error("mixed: --vary must be alpha or theta");
  }
  emit(opts, report.dump(2));
  return kExitOk;
}

int cmd_fit(const CommonOptions& opts, const std::string& csv_path,
            std::optional<double> window, const std::string& dof_label,
            bool even_only) {
  std::ifstream in(csv_path);
  if (!in) throw validation_error("cannot open file: " + csv_path);
  DipCurve curve = read_csv(in);
  if (!dof_label.empty()) curve.f_kind = dof_kind_from_string(dof_label);
  curve = window ? fit_parabola(std::move(curve), *window, even_only)
                 : fit_parabola_auto(std::move(curve), even_only);
  emit(opts, fit_summary_json(curve));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-photon Hong-Ou-Mandel coincidence probabilities and rates of "
      "distinguishability for Gaussian wave packets"};
  app.require_subcommand(1);

  // p11
  CommonOptions p11_opts;
  std::string p11_a, p11_b;
  CLI::App* p11_cmd = app.add_subcommand(
      "p11", "Coincidence probability for two states (packets or densities)");
  p11_cmd->add_option("--state-a", p11_a, "JSON descriptor of the first state")
      ->required();
  p11_cmd->add_option("--state-b", p11_b, "JSON descriptor of the second state")
      ->required();
  add_common(p11_cmd, p11_opts);

  // sweep
  CommonOptions sweep_opts;
  std::string sweep_packet, sweep_dof;
  std::pair<double, double> sweep_range{-0.1, 0.1};
  int sweep_points = 41;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Sample the coincidence dip P11 vs delta-f");
  sweep_cmd->add_option("--packet", sweep_packet, "Packet JSON file")
      ->required();
  sweep_cmd->add_option("--dof", sweep_dof, "Degree of freedom to vary")
      ->required();
  sweep_cmd
      ->add_option("--range", sweep_range,
                   "Sweep interval lo hi (lo < 0 < hi)")
      ->required();
  sweep_cmd->add_option("--points", sweep_points, "Number of samples (>= 11)");
  add_common(sweep_cmd, sweep_opts);

  // rate
  CommonOptions rate_opts;
  std::string rate_packet, rate_dof, rate_method = "all";
  CLI::App* rate_cmd =
      app.add_subcommand("rate", "Rate of distinguishability for one DOF");
  rate_cmd->add_option("--packet", rate_packet, "Packet JSON file")->required();
  rate_cmd->add_option("--dof", rate_dof, "Degree of freedom")->required();
  rate_cmd
      ->add_option("--method", rate_method,
                   "closed_form, finite_difference, derivative_form or all")
      ->check(CLI::IsMember(
          {"closed_form", "finite_difference", "derivative_form", "all"}));
  add_common(rate_cmd, rate_opts);

  // table1
  CommonOptions table_opts;
  std::string table_packet;
  bool table_strict = false;
  std::optional<double> table_tol;
  CLI::App* table_cmd = app.add_subcommand(
      "table1", "Closed-form vs finite-difference rates for the nine "
                "spectral/spatial DOFs, plus the position/wave-vector "
                "products");
  table_cmd->add_option("--packet", table_packet, "Packet JSON file")
      ->required();
  table_cmd->add_flag("--strict", table_strict,
                      "Exit 4 when any cell exceeds tolerance");
  table_cmd->add_option("--tol", table_tol,
                        "Relative tolerance (default per engine)");
  add_common(table_cmd, table_opts);

  // mixed
  CommonOptions mixed_opts;
  std::string mixed_family, mixed_vary = "theta";
  double mixed_delta = 0.01;
  CLI::App* mixed_cmd = app.add_subcommand(
      "mixed", "Mixed-state coincidence variation for a polarized mixture");
  mixed_cmd->add_option("--family", mixed_family,
                        "Polarized-mixture JSON {alpha, theta, phi}")
      ->required();
  mixed_cmd
      ->add_option("--vary", mixed_vary,
                   "Parameter to vary: alpha (weights) or theta (DOF)")
      ->check(CLI::IsMember({"alpha", "theta"}));
  mixed_cmd->add_option("--delta", mixed_delta, "Parameter shift");
  add_common(mixed_cmd, mixed_opts, /*with_engine=*/false);

  // fit
  CommonOptions fit_opts;
  std::string fit_csv, fit_dof;
  std::optional<double> fit_window;
  bool fit_even_only = false;
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "Parabolic fit of a sweep CSV, extracting R_f");
  fit_cmd->add_option("--input", fit_csv, "CSV from the sweep subcommand")
      ->required();
  fit_cmd->add_option("--window", fit_window,
                      "Fit window half-width (default: automatic)");
  fit_cmd->add_option("--dof", fit_dof, "DOF label for the report");
  fit_cmd->add_flag("--even-only", fit_even_only, "Drop the linear term");
  add_common(fit_cmd, fit_opts, /*with_engine=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);  // --help
    app.exit(err);
    return kExitValidation;
  }

  try {
    if (p11_cmd->parsed()) return cmd_p11(p11_opts, p11_a, p11_b);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_opts, sweep_packet, sweep_dof, sweep_range.first,
                       sweep_range.second, sweep_points);
    if (rate_cmd->parsed())
      return cmd_rate(rate_opts, rate_packet, rate_dof, rate_method);
    if (table_cmd->parsed())
      return cmd_table1(table_opts, table_packet, table_strict, table_tol);
    if (mixed_cmd->parsed())
      return cmd_mixed(mixed_opts, mixed_family, mixed_vary, mixed_delta);
    if (fit_cmd->parsed())
      return cmd_fit(fit_opts, fit_csv, fit_window, fit_dof, fit_even_only);
  } catch (const validation_error& err) {
    std::cerr << "validation error: " << err.what() << '\n';
    return kExitValidation;
  } catch (const convergence_error& err) {
    std::cerr << "convergence error: " << err.what() << '\n';
    return kExitConvergence;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

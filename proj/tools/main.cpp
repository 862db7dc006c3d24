// equifocal: batch front end for the focal-structure toolkit. Subcommands
// construct ambient spaces and Clifford systems, run focal scans and
// invariant probes, and emit machine-readable reports.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "equifocal/focal.hpp"
#include "equifocal/hopf.hpp"
#include "equifocal/json_io.hpp"
#include "equifocal/otfkm.hpp"
#include "equifocal/symspace.hpp"
#include "equifocal/version.hpp"

namespace {

using equifocal::Json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitUsage = 64;

struct CommonOptions {
  std::string output = "-";
  std::string format = "json";
  std::string config_file;
  std::uint64_t seed = 0;
  int grid = 4096;
  double t_tol = 1e-12;
  double null_tol = 1e-7;
  double det_tol = 1e-10;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--output", opts.output, "Report destination path, '-' for stdout");
  cmd->add_option("--format", opts.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--config", opts.config_file, "JSON config merged under explicit flags");
  cmd->add_option("--seed", opts.seed, "Random seed recorded in the report");
  cmd->add_option("--grid", opts.grid, "Scan grid points per half-period");
  cmd->add_option("--t-tol", opts.t_tol, "Root refinement tolerance");
  cmd->add_option("--null-tol", opts.null_tol, "Relative singular-value threshold for nullity");
  cmd->add_option("--det-tol", opts.det_tol, "|det| threshold for tangential roots");
}

// Config-file values act as defaults: they apply only to flags absent from
// the command line.
template <typename T>
void config_default(const CLI::App* cmd, const Json& cfg, const std::string& flag,
                    const std::string& key, T& var) {
  if (cmd->count(flag) == 0 && cfg.contains(key)) var = cfg.at(key).get<T>();
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  return equifocal::load_json_file(path);
}

void apply_common_config(const CLI::App* cmd, const Json& cfg, CommonOptions& opts) {
  config_default(cmd, cfg, "--seed", "seed", opts.seed);
  config_default(cmd, cfg, "--grid", "grid", opts.grid);
  config_default(cmd, cfg, "--t-tol", "t_tol", opts.t_tol);
  config_default(cmd, cfg, "--null-tol", "null_tol", opts.null_tol);
  config_default(cmd, cfg, "--det-tol", "det_tol", opts.det_tol);
  config_default(cmd, cfg, "--output", "output", opts.output);
  config_default(cmd, cfg, "--format", "format", opts.format);
}

equifocal::FocalScanOptions scan_options(const CommonOptions& opts, double circle_length) {
  equifocal::FocalScanOptions s;
  s.points_per_half_period = opts.grid;
  s.t_tol = opts.t_tol;
  s.null_tol = opts.null_tol;
  s.det_tol = opts.det_tol;
  s.circle_length = circle_length;
  return s;
}

Json report_envelope(const std::string& command, const CommonOptions& opts, Json config_echo) {
  Json j;
  j["tool"] = "equifocal";
  j["version"] = equifocal::kVersion;
  j["command"] = command;
  j["seed"] = opts.seed;
  j["tolerances"] = Json{{"grid", opts.grid},
                         {"t_tol", opts.t_tol},
                         {"null_tol", opts.null_tol},
                         {"det_tol", opts.det_tol}};
  j["config"] = std::move(config_echo);
  return j;
}

void emit(const Json& report, const CommonOptions& opts) {
  std::string text =
      opts.format == "csv" ? equifocal::json_to_csv(report) : report.dump(2) + "\n";
  if (opts.output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(opts.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + opts.output + "'");
    out << text;
  }
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    values.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
  }
  return values;
}

struct ShapeSource {
  equifocal::ShapeOperator shape;
  std::optional<int> otfkm_l;  // set when the operator came from an OT-FKM sample
};

ShapeSource resolve_shape(const std::string& token, const equifocal::RootSpectrum* spectrum,
                          double level, std::uint64_t seed) {
  const auto colon = token.find(':');
  const std::string head = token.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : token.substr(colon + 1);
  if (head == "diag") {
    if (spectrum == nullptr) throw std::invalid_argument("--shape diag requires --space");
    const std::vector<double> d = parse_number_list(arg);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d.size(), d.size());
    for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return {equifocal::ShapeOperator(std::move(m), *spectrum), std::nullopt};
  }
  if (head == "file") {
    if (spectrum == nullptr) throw std::invalid_argument("--shape file requires --space");
    return {equifocal::shape_operator_from_json(equifocal::load_json_file(arg), *spectrum),
            std::nullopt};
  }
  if (head == "otfkm") {
    const std::vector<double> ml = parse_number_list(arg);
    if (ml.size() != 2) throw std::invalid_argument("--shape otfkm needs 'otfkm:m,l'");
    const auto system =
        equifocal::CliffordSystem::build(static_cast<int>(ml[0]), static_cast<int>(ml[1]));
    const auto points = equifocal::sample_level(system, level, 1, seed);
    auto sample = equifocal::shape_operator_at(system, points.front());
    return {std::move(sample.shape), system.l()};
  }
  throw std::invalid_argument("unknown shape source '" + head +
                              "' (expected diag:..., file:... or otfkm:m,l)");
}

int cmd_focal_scan(const CLI::App* cmd, CommonOptions& opts, std::string& space_tok,
                   std::string& shape_tok, double& t_max, double& level,
                   std::string& direction_tok, bool adapted) {
  const Json cfg = load_config(opts.config_file);
  apply_common_config(cmd, cfg, opts);
  config_default(cmd, cfg, "--space", "space", space_tok);
  config_default(cmd, cfg, "--shape", "shape", shape_tok);
  config_default(cmd, cfg, "--tmax", "tmax", t_max);
  config_default(cmd, cfg, "--level", "level", level);

  std::optional<equifocal::AmbientSpace> space;
  if (!space_tok.empty()) space = equifocal::parse_space(space_tok);

  std::optional<equifocal::RootSpectrum> spectrum;
  if (space) {
    if (space->rank() == 1) {
      spectrum = space->spectrum();
    } else {
      if (direction_tok.empty())
        throw std::invalid_argument("rank >= 2 spaces need --direction in the abelian frame");
      const std::vector<double> dir = parse_number_list(direction_tok);
      spectrum = space->spectrum_at(
          Eigen::Map<const Eigen::VectorXd>(dir.data(), static_cast<Eigen::Index>(dir.size())));
    }
  }

  ShapeSource src = resolve_shape(shape_tok, spectrum ? &*spectrum : nullptr, level, opts.seed);
  if (!spectrum) {
    if (!src.otfkm_l)
      throw std::invalid_argument("--space is required unless --shape otfkm:m,l is used");
    space = equifocal::AmbientSpace::sphere(2 * *src.otfkm_l - 1);
    spectrum = space->spectrum();
  }

  const auto scan_opts = scan_options(opts, space->circle_length());
  if (t_max <= 0.0) t_max = space->circle_length();
  if (t_max > space->circle_length()) {
    if (t_max > space->circle_length() + 1e-3)
      throw std::invalid_argument("--tmax exceeds the normal circle length " +
                                  std::to_string(space->circle_length()));
    t_max = space->circle_length();  // tolerate rounded values like 6.2832
  }
  equifocal::FocalProfile profile =
      adapted ? equifocal::focal_scan_adapted(*spectrum, src.shape, t_max, scan_opts)
              : equifocal::focal_scan(*spectrum, src.shape, t_max, scan_opts);

  // Focal-count bound check on the sub-profile below pi / beta.
  equifocal::FocalProfile truncated = profile;
  const double window = std::numbers::pi / space->beta_sup();
  std::erase_if(truncated.roots, [&](const equifocal::FocalRoot& r) { return r.t >= window; });
  const auto bound = equifocal::count_and_bound(truncated, *spectrum);

  Json report = report_envelope("focal-scan", opts,
                                Json{{"space", space->name()},
                                     {"shape", shape_tok},
                                     {"tmax", t_max},
                                     {"level", level},
                                     {"adapted", adapted}});
  report["profile"] = equifocal::to_json(profile);
  report["count_bound"] = equifocal::to_json(bound);
  emit(report, opts);
  return (bound.pass && bound.sphere_pass) ? kExitOk : kExitCheckFailed;
}

int cmd_otfkm(const CLI::App* cmd, CommonOptions& opts, int& m, int& l, double& level,
              int& samples, bool with_matrices) {
  const Json cfg = load_config(opts.config_file);
  apply_common_config(cmd, cfg, opts);
  config_default(cmd, cfg, "--m", "m", m);
  config_default(cmd, cfg, "--l", "l", l);
  config_default(cmd, cfg, "--level", "level", level);
  config_default(cmd, cfg, "--samples", "samples", samples);

  const auto system = equifocal::CliffordSystem::build(m, l);
  const auto points = equifocal::sample_level(system, level, samples, opts.seed);

  Json report = report_envelope(
      "otfkm", opts,
      Json{{"m", m}, {"l", l}, {"level", level}, {"samples", samples}});
  if (with_matrices) {
    report["system"] = equifocal::to_json(system);
  } else {
    report["system"] = Json{{"m", m}, {"l", l}};
  }
  Json sample_rows = Json::array();
  for (const auto& z : points) sample_rows.push_back(equifocal::to_json(shape_operator_at(system, z)));
  report["samples"] = std::move(sample_rows);
  emit(report, opts);
  return kExitOk;
}

int cmd_invariants(const CLI::App* cmd, CommonOptions& opts, int& m, int& l,
                   std::string& structure_tok, double& level, int& count, int& g_degree,
                   bool anchor_points) {
  const Json cfg = load_config(opts.config_file);
  apply_common_config(cmd, cfg, opts);
  config_default(cmd, cfg, "--m", "m", m);
  config_default(cmd, cfg, "--l", "l", l);
  config_default(cmd, cfg, "--structure", "structure", structure_tok);
  config_default(cmd, cfg, "--level", "level", level);
  config_default(cmd, cfg, "--count", "count", count);
  config_default(cmd, cfg, "--g-degree", "g_degree", g_degree);

  const auto system = equifocal::CliffordSystem::build(m, l);
  equifocal::ComplexStructure structure;
  std::string structure_name;
  if (structure_tok == "j") {
    structure = equifocal::make_standard_j(l);
    structure_name = "J";
  } else if (structure_tok == "jprime") {
    if (l % 2 != 0)
      throw std::invalid_argument("the twisted structure needs an even l (l = 2n + 2)");
    structure = equifocal::make_twisted_jprime(l / 2 - 1);
    structure_name = "Jprime";
  } else {
    throw std::invalid_argument("unknown structure '" + structure_tok + "' (expected j or jprime)");
  }

  const auto points = equifocal::sample_level(system, level, count, opts.seed);
  std::vector<double> omegas;
  omegas.reserve(points.size());
  for (const auto& z : points) omegas.push_back(equifocal::omega_f(system, structure, z));
  double omega_mean = 0.0, omega_min = omegas.front(), omega_max = omegas.front();
  for (double v : omegas) {
    omega_mean += v / omegas.size();
    omega_min = std::min(omega_min, v);
    omega_max = std::max(omega_max, v);
  }
  double omega_var = 0.0;
  for (double v : omegas) omega_var += (v - omega_mean) * (v - omega_mean) / omegas.size();
  const double omega_std = std::sqrt(omega_var);

  const auto alpha = equifocal::homogeneity_probe(system, structure, level, count, opts.seed,
                                                  g_degree);

  Json report = report_envelope("invariants", opts,
                                Json{{"m", m},
                                     {"l", l},
                                     {"structure", structure_name},
                                     {"level", level},
                                     {"count", count},
                                     {"g_degree", g_degree},
                                     {"anchor_points", anchor_points}});
  Json reports = Json::array();
  reports.push_back(Json{{"invariant", "omega"},
                         {"structure", structure_name},
                         {"level", level},
                         {"stats", Json{{"mean", omega_mean},
                                        {"std", omega_std},
                                        {"min", omega_min},
                                        {"max", omega_max},
                                        {"count", static_cast<int>(omegas.size())}}},
                         {"verdict", omega_std < 1e-6 * std::max(1.0, std::abs(omega_mean))
                                         ? "constant"
                                         : "non-constant"}});
  reports.push_back(Json{{"invariant", "alpha"},
                         {"structure", structure_name},
                         {"level", level},
                         {"stats", equifocal::to_json(alpha)},
                         {"verdict", alpha.constant_verdict ? "constant" : "non-constant"}});
  report["reports"] = std::move(reports);

  bool anchors_ok = true;
  if (anchor_points) {
    if (m != 1 || l % 2 != 0 || l < 4)
      throw std::invalid_argument("--anchor-points needs m = 1 and even l >= 4");
    const auto [z, zhat] = equifocal::twisted_anchor_points(l / 2 - 1);
    const double w0 = equifocal::omega_f(system, structure, z);
    const double w1 = equifocal::omega_f(system, structure, zhat);
    Json anchors = Json::array();
    anchors.push_back(Json{{"point", "z"}, {"omega", w0}});
    anchors.push_back(Json{{"point", "zhat"}, {"omega", w1}});
    report["anchors"] = std::move(anchors);
    if (structure_name == "Jprime")
      anchors_ok = std::abs(w0 - 128.0) < 1e-9 && std::abs(w1 + 128.0) < 1e-9;
    report["anchors_pass"] = anchors_ok;
  }
  emit(report, opts);
  return anchors_ok ? kExitOk : kExitCheckFailed;
}

int cmd_bounds(const CLI::App* cmd, CommonOptions& opts, std::string& space_tok, int g, int m1,
               int m2) {
  const Json cfg = load_config(opts.config_file);
  apply_common_config(cmd, cfg, opts);
  config_default(cmd, cfg, "--space", "space", space_tok);

  const auto space = equifocal::parse_space(space_tok);
  Json report = report_envelope("bounds", opts, Json{{"space", space.name()}});
  report["dim"] = space.dim();
  report["rank"] = space.rank();
  report["beta_sup"] = space.beta_sup();
  report["focal_distance_lower_bound"] = equifocal::focal_lower_bound(space);

  bool pass = true;
  if (space.rank() == 1) {
    // Report the closed-form requirement with a neutral (g, m1, m2) so the
    // required product is always shown; check the user's triple when given.
    const auto probe = equifocal::thorbergsson_check(space, 1, 1, 1);
    report["required_g_m1_plus_m2"] = probe.required_product;
    report["distance_bound_from_identity"] = probe.distance_lower_bound;
    if (g > 0) {
      const auto rep = equifocal::thorbergsson_check(space, g, m1, m2);
      report["thorbergsson"] = equifocal::to_json(rep);
      pass = rep.pass;
    }
  }
  emit(report, opts);
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const CLI::App* cmd, CommonOptions& opts, int& m, int& l, double& level,
               int& samples, int expect_g, int expect_m1, int expect_m2) {
  const Json cfg = load_config(opts.config_file);
  apply_common_config(cmd, cfg, opts);
  config_default(cmd, cfg, "--m", "m", m);
  config_default(cmd, cfg, "--l", "l", l);
  config_default(cmd, cfg, "--level", "level", level);
  config_default(cmd, cfg, "--samples", "samples", samples);
  if (samples < 2) throw std::invalid_argument("verify needs --samples >= 2");

  const auto system = equifocal::CliffordSystem::build(m, l);
  const auto points = equifocal::sample_level(system, level, samples, opts.seed);
  const auto space = equifocal::AmbientSpace::sphere(2 * l - 1);
  const auto spectrum = space.spectrum();
  const auto scan_opts = scan_options(opts, space.circle_length());

  std::vector<equifocal::ShapeOperator> shapes;
  std::vector<equifocal::FocalProfile> profiles;
  for (const auto& z : points) {
    auto sample = equifocal::shape_operator_at(system, z);
    profiles.push_back(
        equifocal::focal_scan(spectrum, sample.shape, space.circle_length(), scan_opts));
    shapes.push_back(std::move(sample.shape));
  }

  const auto equifocality = equifocal::verify_equifocal(profiles);
  const auto constancy = equifocal::principal_curvature_constancy(shapes);

  bool cut_ok = true;
  double worst_product = 0.0;
  for (size_t i = 0; i < shapes.size(); ++i) {
    const auto cut = equifocal::cut_focal_check(profiles[i], shapes[i]);
    cut_ok = cut_ok && cut.pass;
    worst_product = std::max(worst_product, cut.product);
  }

  bool bound_ok = true;
  for (const auto& p : profiles) {
    equifocal::FocalProfile truncated = p;
    const double window = std::numbers::pi / space.beta_sup();
    std::erase_if(truncated.roots, [&](const equifocal::FocalRoot& r) { return r.t >= window; });
    const auto b = equifocal::count_and_bound(truncated, spectrum);
    bound_ok = bound_ok && b.pass && b.sphere_pass;
  }

  bool expectations_ok = true;
  if (expect_g > 0) expectations_ok = expectations_ok && equifocality.g == expect_g;
  if (expect_m1 > 0) expectations_ok = expectations_ok && equifocality.m1 == expect_m1;
  if (expect_m2 > 0) expectations_ok = expectations_ok && equifocality.m2 == expect_m2;

  const bool pass =
      equifocality.passed && constancy.constant && cut_ok && bound_ok && expectations_ok;

  Json report = report_envelope("verify", opts,
                                Json{{"m", m},
                                     {"l", l},
                                     {"level", level},
                                     {"samples", samples},
                                     {"expect_g", expect_g},
                                     {"expect_m1", expect_m1},
                                     {"expect_m2", expect_m2}});
  report["equifocal"] = equifocal::to_json(equifocality);
  report["curvature_constancy"] = equifocal::to_json(constancy);
  report["cut_focal_worst_product"] = worst_product;
  report["cut_focal_pass"] = cut_ok;
  report["count_bound_pass"] = bound_ok;
  report["expectations_pass"] = expectations_ok;
  report["pass"] = pass;
  emit(report, opts);
  return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equifocal: focal structure of hypersurfaces in compact symmetric spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", equifocal::kVersion);

  CommonOptions opts;

  auto* scan = app.add_subcommand("focal-scan", "Scan a normal circle for focal parameters");
  std::string space_tok, shape_tok, direction_tok;
  double t_max = 0.0, level = 0.0;
  bool adapted = false;
  scan->add_option("--space", space_tok, "Ambient space (sphere:N, cpn:N, hpn:N, cap2, generic:FILE)");
  scan->add_option("--shape", shape_tok, "Shape operator (diag:..., file:PATH, otfkm:m,l)")
      ->required();
  scan->add_option("--tmax", t_max, "Scan upper limit (defaults to the circle length)");
  scan->add_option("--level", level, "Level for otfkm shape sampling");
  scan->add_option("--direction", direction_tok, "Normal direction for rank >= 2 spaces");
  scan->add_flag("--adapted", adapted, "Use the closed-form curvature-adapted enumeration");
  add_common(scan, opts);

  auto* otfkm = app.add_subcommand("otfkm", "Construct a Clifford system and sample a level set");
  int m = 1, l = 4, samples = 20, count = 50, g_degree = 4;
  double otfkm_level = 0.0;
  bool with_matrices = false;
  otfkm->add_option("--m", m, "Clifford system m");
  otfkm->add_option("--l", l, "Clifford system l (matrices act on R^{2l})");
  otfkm->add_option("--level", otfkm_level, "Level value in (-1, 1)");
  otfkm->add_option("--samples", samples, "Number of sampled points");
  otfkm->add_flag("--with-matrices", with_matrices, "Embed the full Clifford matrices");
  add_common(otfkm, opts);

  auto* invariants = app.add_subcommand("invariants", "Omega and alpha statistics on a level set");
  std::string structure_tok = "j";
  double inv_level = 0.0;
  bool anchor_flag = false;
  invariants->add_option("--m", m, "Clifford system m");
  invariants->add_option("--l", l, "Clifford system l");
  invariants->add_option("--structure", structure_tok, "Complex structure: j or jprime");
  invariants->add_option("--level", inv_level, "Level value in (-1, 1)");
  invariants->add_option("--count", count, "Number of sampled points");
  invariants->add_option("--g-degree", g_degree, "Degree constant in the alpha formula");
  invariants->add_flag("--anchor-points", anchor_flag,
                       "Evaluate omega at the two reference points (m = 1, even l)");
  add_common(invariants, opts);

  auto* bounds = app.add_subcommand("bounds", "Focal-distance bounds and product identities");
  std::string bounds_space;
  int g = 0, m1 = 0, m2 = 0;
  bounds->add_option("--space", bounds_space, "Ambient space token")->required();
  bounds->add_option("--g", g, "Number of distinct principal curvatures to check");
  bounds->add_option("--m1", m1, "First multiplicity to check");
  bounds->add_option("--m2", m2, "Second multiplicity to check");
  add_common(bounds, opts);

  auto* verify = app.add_subcommand("verify", "End-to-end equifocality pipeline on OT-FKM data");
  int expect_g = 0, expect_m1 = 0, expect_m2 = 0;
  double verify_level = 0.0;
  verify->add_option("--m", m, "Clifford system m");
  verify->add_option("--l", l, "Clifford system l");
  verify->add_option("--level", verify_level, "Level value in (-1, 1)");
  verify->add_option("--samples", samples, "Number of sampled hypersurface points");
  verify->add_option("--expect-g", expect_g, "Fail unless the detected g matches");
  verify->add_option("--expect-m1", expect_m1, "Fail unless the detected m1 matches");
  verify->add_option("--expect-m2", expect_m2, "Fail unless the detected m2 matches");
  add_common(verify, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (scan->parsed())
      return cmd_focal_scan(scan, opts, space_tok, shape_tok, t_max, level, direction_tok,
                            adapted);
    if (otfkm->parsed()) return cmd_otfkm(otfkm, opts, m, l, otfkm_level, samples, with_matrices);
    if (invariants->parsed())
      return cmd_invariants(invariants, opts, m, l, structure_tok, inv_level, count, g_degree,
                            anchor_flag);
    if (bounds->parsed()) return cmd_bounds(bounds, opts, bounds_space, g, m1, m2);
    if (verify->parsed())
      return cmd_verify(verify, opts, m, l, verify_level, samples, expect_g, expect_m1, expect_m2);
  } catch (const std::exception& e) {
    std::cerr << "equifocal: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

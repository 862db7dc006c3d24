#include "equifocal/json_io.hpp"

#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace equifocal {

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("matrix_from_json: expected a nested array of rows");
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw std::invalid_argument("matrix_from_json: ragged row " + std::to_string(i));
    for (size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("vector_from_json: expected an array");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Json to_json(const FocalProfile& profile) {
  Json j;
  j["l"] = profile.circle_length;
  Json roots = Json::array();
  for (const auto& r : profile.roots) roots.push_back(Json{{"t", r.t}, {"mult", r.multiplicity}});
  j["roots"] = std::move(roots);
  j["g"] = profile.g_half_periods ? Json(*profile.g_half_periods / 2) : Json(nullptr);
  j["theta"] = profile.theta ? Json(*profile.theta) : Json(nullptr);
  j["m1"] = profile.m1 ? Json(*profile.m1) : Json(nullptr);
  j["m2"] = profile.m2 ? Json(*profile.m2) : Json(nullptr);
  return j;
}

FocalProfile focal_profile_from_json(const Json& j) {
  FocalProfile p;
  p.circle_length = j.at("l").get<double>();
  for (const auto& r : j.at("roots"))
    p.roots.push_back({r.at("t").get<double>(), r.at("mult").get<int>()});
  if (j.contains("g") && !j["g"].is_null()) p.g_half_periods = 2 * j["g"].get<int>();
  if (j.contains("theta") && !j["theta"].is_null()) p.theta = j["theta"].get<double>();
  if (j.contains("m1") && !j["m1"].is_null()) p.m1 = j["m1"].get<int>();
  if (j.contains("m2") && !j["m2"].is_null()) p.m2 = j["m2"].get<int>();
  return p;
}

Json to_json(const CliffordSystem& system) {
  Json j;
  j["m"] = system.m();
  j["l"] = system.l();
  Json mats = Json::array();
  for (const auto& a : system.clifford_matrices()) mats.push_back(matrix_to_json(a));
  j["A"] = std::move(mats);
  Json gens = Json::array();
  for (const auto& e : system.skew_generators()) gens.push_back(matrix_to_json(e));
  j["E"] = std::move(gens);
  return j;
}

Json to_json(const HypersurfaceSample& sample) {
  Json j;
  j["z"] = vector_to_json(sample.z);
  j["level"] = sample.level;
  j["normal"] = vector_to_json(sample.normal);
  Json curv = Json::array();
  for (const auto& [value, mult] : sample.curvatures)
    curv.push_back(Json{{"value", value}, {"mult", mult}});
  j["curvatures"] = std::move(curv);
  j["shape"] = matrix_to_json(sample.shape.matrix());
  return j;
}

Json to_json(const CountBoundReport& rep) {
  return Json{{"count", rep.count},
              {"weighted_count", rep.weighted_count},
              {"bound", rep.bound},
              {"pass", rep.pass},
              {"sphere_like", rep.sphere_like},
              {"sphere_bound", rep.sphere_bound},
              {"sphere_pass", rep.sphere_pass}};
}

Json to_json(const EquifocalReport& rep) {
  return Json{{"passed", rep.passed},
              {"message", rep.message},
              {"max_root_deviation", rep.max_root_deviation},
              {"g", rep.g},
              {"theta", rep.theta},
              {"m1", rep.m1},
              {"m2", rep.m2},
              {"spacing", rep.spacing},
              {"focal_distance", rep.focal_distance}};
}

Json to_json(const ConstancyReport& rep) {
  Json j{{"constant", rep.constant}, {"max_deviation", rep.max_deviation}};
  Json eigs = Json::array();
  for (double v : rep.mean_eigenvalues) eigs.push_back(v);
  j["mean_eigenvalues"] = std::move(eigs);
  return j;
}

Json to_json(const CutFocalReport& rep) {
  return Json{{"cut_focal_radius", rep.cut_focal_radius},
              {"kappa", rep.kappa},
              {"product", rep.product},
              {"pass", rep.pass}};
}

Json to_json(const AlphaStats& stats) {
  return Json{{"mean", stats.mean},     {"std", stats.stddev}, {"min", stats.min},
              {"max", stats.max},       {"count", stats.count},
              {"verdict", stats.constant_verdict ? "constant" : "non-constant"}};
}

Json to_json(const ThorbergssonReport& rep) {
  return Json{{"required_product", rep.required_product},
              {"actual_product", rep.actual_product},
              {"pass", rep.pass},
              {"focal_distance", rep.focal_distance},
              {"distance_lower_bound", rep.distance_lower_bound}};
}

RootTable root_table_from_json(const Json& j) {
  RootTable table;
  if (!j.contains("rank")) throw std::invalid_argument("root table: missing field 'rank'");
  table.rank = j.at("rank").get<int>();
  if (!j.contains("roots") || !j["roots"].is_array())
    throw std::invalid_argument("root table: missing or malformed field 'roots'");
  for (const auto& row : j["roots"]) {
    RootTable::Row r;
    if (!row.contains("coeffs"))
      throw std::invalid_argument("root table: a root is missing field 'coeffs'");
    r.coeffs = vector_from_json(row.at("coeffs"));
    r.multiplicity = row.value("mult", 1);
    table.rows.push_back(std::move(r));
  }
  return table;
}

ShapeOperator shape_operator_from_json(const Json& j, const RootSpectrum& spectrum) {
  if (!j.contains("matrix")) throw std::invalid_argument("shape operator: missing field 'matrix'");
  Eigen::MatrixXd m = matrix_from_json(j.at("matrix"));
  const std::string tag = j.value("frame_tag", spectrum.frame_tag());
  return ShapeOperator(std::move(m), tag);
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed JSON in '" + path + "': " + e.what());
  }
}

AmbientSpace parse_space(const std::string& token) {
  const auto colon = token.find(':');
  const std::string head = token.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : token.substr(colon + 1);
  auto int_arg = [&](const char* what) {
    try {
      size_t used = 0;
      const int v = std::stoi(arg, &used);
      if (used != arg.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("parse_space: '") + head + "' needs an integer " +
                                  what + " (got '" + arg + "')");
    }
  };
  if (head == "sphere") return AmbientSpace::sphere(int_arg("dimension"));
  if (head == "cpn") return AmbientSpace::complex_projective(int_arg("complex dimension"));
  if (head == "hpn") return AmbientSpace::quaternion_projective(int_arg("quaternionic dimension"));
  if (head == "cap2") return AmbientSpace::cayley_plane();
  if (head == "generic") {
    if (arg.empty())
      throw std::invalid_argument("parse_space: 'generic' needs a root-table JSON file");
    return AmbientSpace::generic(root_table_from_json(load_json_file(arg)),
                                 2.0 * std::numbers::pi);
  }
  throw std::invalid_argument("parse_space: unknown space '" + head +
                              "' (expected sphere:N, cpn:N, hpn:N, cap2 or generic:FILE)");
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::ostringstream& os) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items())
      flatten(value, prefix.empty() ? key : prefix + "." + key, os);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
  } else {
    os << prefix << "," << j.dump() << "\n";
  }
}

}  // namespace

std::string json_to_csv(const Json& j) {
  std::ostringstream os;
  os << "key,value\n";
  flatten(j, "", os);
  return os.str();
}

}  // namespace equifocal

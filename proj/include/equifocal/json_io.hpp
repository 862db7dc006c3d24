#pragma once

#include <json.hpp>

#include <string>

#include "equifocal/focal.hpp"
#include "equifocal/hopf.hpp"
#include "equifocal/otfkm.hpp"
#include "equifocal/shape_operator.hpp"
#include "equifocal/symspace.hpp"

namespace equifocal {

using Json = nlohmann::ordered_json;

Json to_json(const FocalProfile& profile);
FocalProfile focal_profile_from_json(const Json& j);

Json to_json(const CliffordSystem& system);
Json to_json(const HypersurfaceSample& sample);

Json to_json(const CountBoundReport& rep);
Json to_json(const EquifocalReport& rep);
Json to_json(const ConstancyReport& rep);
Json to_json(const CutFocalReport& rep);
Json to_json(const AlphaStats& stats);
Json to_json(const ThorbergssonReport& rep);

/// Root table document: {"rank": r, "roots": [{"coeffs": [...], "mult": m}]}.
RootTable root_table_from_json(const Json& j);

/// Shape-operator document: {"matrix": [[...], ...]} with an optional
/// "frame_tag" field; when absent the operator is bound to `spectrum`.
ShapeOperator shape_operator_from_json(const Json& j, const RootSpectrum& spectrum);

Json matrix_to_json(const Eigen::MatrixXd& m);  // row-major nested arrays
Json vector_to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const Json& j);
Eigen::VectorXd vector_from_json(const Json& j);

/// Reads and parses a JSON file; errors name the file and parse position.
Json load_json_file(const std::string& path);

/// Flattens a report into two-column CSV (path,value) rows.
std::string json_to_csv(const Json& j);

}  // namespace equifocal

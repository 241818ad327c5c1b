#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lipselect/bartle_graves.hpp"
#include "lipselect/convex_body.hpp"
#include "lipselect/correspondence.hpp"
#include "lipselect/lipschitz.hpp"
#include "lipselect/metric_space.hpp"
#include "lipselect/selection.hpp"

// JSON and CSV document formats. Every parse error is an Error of kind
// `schema` whose message starts with the JSON pointer of the offending node.
namespace lipselect::io {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"metric": "l2"|"l1"|"linf", "points": [[...], ...]} or
/// {"metric": "explicit", "distances": [[...], ...]}. Scalar points are
/// read as 1-D coordinates.
SampledMetricSpace space_from_json(const json& j);
json to_json(const SampledMetricSpace& space);

/// {"rounds": [{"n": 1, "r": 1.0, "B": [ids]}, ...]}
json to_json(const SeparationHierarchy& h);

/// {"kind": "flat", "base": [...], "basis": [[...], ...]} (basis vectors as
/// rows) | {"kind": "ball", "center": [...], "radius": r} |
/// {"kind": "polytope", "halfspaces": [{"normal": [...], "offset": b}], "witness": [...]}
ConvexBody body_from_json(const json& j);
json to_json(const ConvexBody& body);

/// {"space": <space>, "bodies": {"<id>": <body>, ...}} (an array of bodies
/// in id order is also accepted).
Correspondence correspondence_from_json(const json& j);
json to_json(const Correspondence& phi);

/// {"matrix": [[...], ...]}
LinearSurjection surjection_from_json(const json& j);

/// {"alpha", "beta", "epsilon"?, "rounds", "delta_min"?, "tol"?, "r_b"?}
IterationConfig iteration_config_from_json(const json& j);
json to_json(const IterationConfig& config);

/// Selection tables: {"values": [[...], ...]}
Eigen::MatrixXd table_from_json(const json& j, const std::string& where = "");
json table_to_json(const Eigen::MatrixXd& table);

/// Full sequence: config, epsilon, per-round records and every table f_0..f_N.
json to_json(const SelectionSequence& seq);
SelectionSequence sequence_from_json(const json& j);

/// point_id,x1,...,xd with 17 significant digits.
std::string table_to_csv(const Eigen::MatrixXd& table);
/// Rows of point_id,r,ratio for each profile.
std::string profiles_to_csv(const std::vector<PlipProfile>& profiles);

std::string format_double(double x);
/// Pretty-printed JSON with every float written by format_double.
std::string dump(const json& j);

}  // namespace lipselect::io

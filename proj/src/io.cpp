#include "lipselect/io.hpp"

#include <cstdio>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lipselect/errors.hpp"

namespace lipselect::io {
namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::schema, (where.empty() ? std::string("/") : where) + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(where, std::string("missing key '") + key + "'");
  return *it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_error(where, "expected an integer");
  return j.get<int>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_number(j[i], where + "/" + std::to_string(i));
  }
  return v;
}

/// Array of equal-length rows; scalar rows become 1-element rows.
Eigen::MatrixXd as_rows(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const bool scalars = j.front().is_number();
  const std::size_t cols = scalars ? 1 : (j.front().is_array() ? j.front().size() : 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string here = where + "/" + std::to_string(i);
    if (scalars) {
      m(static_cast<Eigen::Index>(i), 0) = as_number(j[i], here);
      continue;
    }
    const Eigen::VectorXd row = as_vector(j[i], here);
    if (static_cast<std::size_t>(row.size()) != cols) schema_error(here, "ragged rows");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json rows_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

json ids_json(const PointSet& ids) {
  json out = json::array();
  for (PointId id : ids) out.push_back(id);
  return out;
}

PointSet ids_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of point ids");
  PointSet out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_unsigned()) schema_error(where + "/" + std::to_string(i), "expected a point id");
    out.push_back(j[i].get<PointId>());
  }
  return out;
}

// Library errors raised while assembling a document are reported as schema
// errors at `where` unless they are already schema errors.
template <class F>
auto at_location(const std::string& where, F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::schema) throw;
    schema_error(where, e.what());
  }
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::schema, path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::configuration, path.string() + ": cannot write file");
  out << text;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_into(const json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        dump_into(value, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_into(j[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const json& j) {
  std::string out;
  dump_into(j, 0, out);
  out += '\n';
  return out;
}

SampledMetricSpace space_from_json(const json& j) {
  const std::string metric_name = [&] {
    const json& m = require(j, "metric", "");
    if (!m.is_string()) schema_error("/metric", "expected a string");
    return m.get<std::string>();
  }();
  const MetricKind kind = at_location("/metric", [&] { return parse_metric_kind(metric_name); });
  if (kind == MetricKind::explicit_matrix) {
    Eigen::MatrixXd d = as_rows(require(j, "distances", ""), "/distances");
    auto space = at_location("/distances", [&] { return SampledMetricSpace::from_distances(d); });
    if (auto bad = find_triangle_violation(space, 1e-12)) {
      schema_error("/distances", "triangle inequality fails at (" + std::to_string((*bad)[0]) +
                                     ", " + std::to_string((*bad)[1]) + ", " +
                                     std::to_string((*bad)[2]) + ")");
    }
    return space;
  }
  Eigen::MatrixXd pts = as_rows(require(j, "points", ""), "/points");
  if (pts.rows() == 0) schema_error("/points", "space needs at least one point");
  return at_location("/points", [&] { return SampledMetricSpace(kind, pts); });
}

json to_json(const SampledMetricSpace& space) {
  json out;
  out["metric"] = std::string(to_string(space.kind()));
  if (space.kind() == MetricKind::explicit_matrix) {
    out["distances"] = rows_json(*space.explicit_distances());
  } else {
    out["points"] = rows_json(space.coords());
  }
  return out;
}

json to_json(const SeparationHierarchy& h) {
  json rounds = json::array();
  for (const auto& r : h.rounds) {
    rounds.push_back({{"n", r.n}, {"r", r.r}, {"B", ids_json(r.members)}});
  }
  return {{"rounds", rounds}};
}

ConvexBody body_from_json(const json& j) {
  const json& kind_node = require(j, "kind", "");
  if (!kind_node.is_string()) schema_error("/kind", "expected a string");
  const std::string kind = kind_node.get<std::string>();
  if (kind == "flat") {
    Eigen::VectorXd base = as_vector(require(j, "base", ""), "/base");
    Eigen::MatrixXd basis(base.size(), 0);
    if (j.contains("basis")) {
      const Eigen::MatrixXd rows = as_rows(j["basis"], "/basis");
      if (rows.rows() > 0) basis = rows.transpose();
    }
    return at_location("/basis", [&] { return ConvexBody::flat(base, basis); });
  }
  if (kind == "ball") {
    Eigen::VectorXd center = as_vector(require(j, "center", ""), "/center");
    const double radius = as_number(require(j, "radius", ""), "/radius");
    return at_location("/radius", [&] { return ConvexBody::ball(center, radius); });
  }
  if (kind == "polytope") {
    const json& hs = require(j, "halfspaces", "");
    if (!hs.is_array()) schema_error("/halfspaces", "expected an array");
    std::vector<Halfspace> halfspaces;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const std::string here = "/halfspaces/" + std::to_string(i);
      halfspaces.push_back({as_vector(require(hs[i], "normal", here), here + "/normal"),
                            as_number(require(hs[i], "offset", here), here + "/offset")});
    }
    Eigen::VectorXd witness = as_vector(require(j, "witness", ""), "/witness");
    return at_location("/witness", [&] { return ConvexBody::polytope(halfspaces, witness); });
  }
  schema_error("/kind", "unknown body kind '" + kind + "'");
}

json to_json(const ConvexBody& body) {
  if (const auto* f = body.as<AffineFlat>()) {
    return {{"kind", "flat"}, {"base", vector_json(f->base)}, {"basis", rows_json(f->basis.transpose())}};
  }
  if (const auto* b = body.as<Ball>()) {
    return {{"kind", "ball"}, {"center", vector_json(b->center)}, {"radius", b->radius}};
  }
  const auto& p = *body.as<Polytope>();
  json hs = json::array();
  for (const auto& h : p.halfspaces) hs.push_back({{"normal", vector_json(h.normal)}, {"offset", h.offset}});
  return {{"kind", "polytope"}, {"halfspaces", hs}, {"witness", vector_json(p.witness)}};
}

namespace {

ConvexBody body_at(const json& j, const std::string& where) {
  try {
    return body_from_json(j);
  } catch (const Error& e) {
    const std::string msg = e.what();
    throw Error(ErrorKind::schema, where + (msg.rfind('/', 0) == 0 ? msg : ": " + msg));
  }
}

}  // namespace

Correspondence correspondence_from_json(const json& j) {
  SampledMetricSpace space = [&] {
    try {
      return space_from_json(require(j, "space", ""));
    } catch (const Error& e) {
      throw Error(ErrorKind::schema, std::string("/space") + e.what());
    }
  }();
  const json& bodies_node = require(j, "bodies", "");
  std::vector<ConvexBody> bodies;
  if (bodies_node.is_array()) {
    for (std::size_t i = 0; i < bodies_node.size(); ++i) {
      bodies.push_back(body_at(bodies_node[i], "/bodies/" + std::to_string(i)));
    }
  } else if (bodies_node.is_object()) {
    for (PointId id = 0; id < space.size(); ++id) {
      const std::string key = std::to_string(id);
      if (!bodies_node.contains(key)) schema_error("/bodies", "missing body for point " + key);
      bodies.push_back(body_at(bodies_node[key], "/bodies/" + key));
    }
    if (bodies_node.size() != space.size()) schema_error("/bodies", "bodies for unknown point ids");
  } else {
    schema_error("/bodies", "expected an object keyed by point id");
  }
  return at_location("/bodies", [&] { return Correspondence(std::move(space), std::move(bodies)); });
}

json to_json(const Correspondence& phi) {
  json bodies = json::object();
  for (PointId id = 0; id < phi.size(); ++id) bodies[std::to_string(id)] = to_json(phi.value(id));
  return {{"space", to_json(phi.space())}, {"bodies", bodies}};
}

LinearSurjection surjection_from_json(const json& j) {
  Eigen::MatrixXd m = as_rows(require(j, "matrix", ""), "/matrix");
  return LinearSurjection(std::move(m));
}

IterationConfig iteration_config_from_json(const json& j) {
  IterationConfig c;
  c.alpha = as_number(require(j, "alpha", ""), "/alpha");
  c.beta = as_number(require(j, "beta", ""), "/beta");
  c.rounds = as_int(require(j, "rounds", ""), "/rounds");
  if (j.contains("epsilon") && !j["epsilon"].is_null()) c.epsilon = as_number(j["epsilon"], "/epsilon");
  if (j.contains("delta_min")) c.delta_min = as_number(j["delta_min"], "/delta_min");
  if (j.contains("tol")) c.tol = as_number(j["tol"], "/tol");
  if (j.contains("r_b")) {
    const json& rb = j["r_b"];
    if (rb.is_number()) {
      c.default_locality_radius = rb.get<double>();
    } else if (rb.is_object()) {
      for (const auto& [key, value] : rb.items()) {
        c.locality_radii[std::stoul(key)] = as_number(value, "/r_b/" + key);
      }
    } else if (!rb.is_null()) {
      schema_error("/r_b", "expected a number or an object keyed by point id");
    }
  }
  return c;
}

json to_json(const IterationConfig& c) {
  json out{{"alpha", c.alpha}, {"beta", c.beta}, {"rounds", c.rounds},
           {"delta_min", c.delta_min}, {"tol", c.tol}};
  out["epsilon"] = c.epsilon ? json(*c.epsilon) : json(nullptr);
  if (std::isfinite(c.default_locality_radius)) out["r_b"] = c.default_locality_radius;
  if (!c.locality_radii.empty()) {
    json rb = json::object();
    for (const auto& [b, r] : c.locality_radii) rb[std::to_string(b)] = r;
    out["r_b"] = rb;
  }
  return out;
}

Eigen::MatrixXd table_from_json(const json& j, const std::string& where) {
  return as_rows(require(j, "values", where), where + "/values");
}

json table_to_json(const Eigen::MatrixXd& table) { return {{"values", rows_json(table)}}; }

json to_json(const SelectionSequence& seq) {
  json rounds = json::array();
  for (const auto& r : seq.rounds) {
    json deltas = json::object();
    for (const auto& [b, d] : r.deltas) deltas[std::to_string(b)] = d;
    rounds.push_back({{"n", r.n},
                      {"B", ids_json(r.members)},
                      {"new_points", ids_json(r.new_points)},
                      {"deltas", deltas},
                      {"sup_change", r.sup_change},
                      {"sup_bound", std::ldexp(seq.epsilon, -r.n)}});
  }
  json selections = json::array();
  for (const auto& s : seq.selections) selections.push_back(rows_json(s.values));
  return {{"config", to_json(seq.config)},
          {"epsilon", seq.epsilon},
          {"tail_bound", std::ldexp(seq.epsilon, -seq.round_count())},
          {"rounds", rounds},
          {"selections", selections}};
}

SelectionSequence sequence_from_json(const json& j) {
  SelectionSequence seq;
  seq.config = [&] {
    try {
      return iteration_config_from_json(require(j, "config", ""));
    } catch (const Error& e) {
      throw Error(ErrorKind::schema, std::string("/config") + e.what());
    }
  }();
  seq.epsilon = as_number(require(j, "epsilon", ""), "/epsilon");
  const json& rounds = require(j, "rounds", "");
  if (!rounds.is_array()) schema_error("/rounds", "expected an array");
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const std::string here = "/rounds/" + std::to_string(i);
    RoundRecord r;
    r.n = as_int(require(rounds[i], "n", here), here + "/n");
    if (r.n != static_cast<int>(i) + 1) schema_error(here + "/n", "rounds must be numbered 1..N");
    r.members = ids_from_json(require(rounds[i], "B", here), here + "/B");
    r.new_points = ids_from_json(require(rounds[i], "new_points", here), here + "/new_points");
    const json& deltas = require(rounds[i], "deltas", here);
    if (!deltas.is_object()) schema_error(here + "/deltas", "expected an object");
    for (const auto& [key, value] : deltas.items()) {
      r.deltas[std::stoul(key)] = as_number(value, here + "/deltas/" + key);
    }
    r.sup_change = as_number(require(rounds[i], "sup_change", here), here + "/sup_change");
    seq.hierarchy.rounds.push_back({r.n, std::ldexp(1.0, -(r.n - 1)), r.members});
    seq.rounds.push_back(std::move(r));
  }
  const json& selections = require(j, "selections", "");
  if (!selections.is_array() || selections.size() != rounds.size() + 1) {
    schema_error("/selections", "expected N + 1 selection tables");
  }
  for (std::size_t i = 0; i < selections.size(); ++i) {
    seq.selections.push_back({as_rows(selections[i], "/selections/" + std::to_string(i)),
                              static_cast<int>(i)});
  }
  return seq;
}

std::string table_to_csv(const Eigen::MatrixXd& table) {
  std::ostringstream out;
  out << "point_id";
  for (Eigen::Index c = 0; c < table.cols(); ++c) out << ",x" << (c + 1);
  out << '\n';
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    out << r;
    for (Eigen::Index c = 0; c < table.cols(); ++c) out << ',' << format_double(table(r, c));
    out << '\n';
  }
  return out.str();
}

std::string profiles_to_csv(const std::vector<PlipProfile>& profiles) {
  std::ostringstream out;
  out << "point_id,r,ratio\n";
  for (const auto& p : profiles) {
    for (const auto& row : p.rows) {
      out << p.point << ',' << format_double(row.r) << ',' << format_double(row.ratio) << '\n';
    }
  }
  return out.str();
}

}  // namespace lipselect::io

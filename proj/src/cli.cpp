#include "lipselect/cli.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "lipselect/bartle_graves.hpp"
#include "lipselect/errors.hpp"
#include "lipselect/io.hpp"

namespace lipselect::cli {
namespace {

using io::json;

/// Command-line values layered over the --config document.
class Params {
 public:
  explicit Params(const RunConfig& rc) : rc_(rc) {
    if (rc.config) doc_ = io::read_json_file(*rc.config);
    if (!doc_.is_object()) doc_ = json::object();
  }

  const json& doc() const { return doc_; }

  std::optional<double> number(const std::optional<double>& flag, const char* key) const {
    if (flag) return flag;
    if (!doc_.contains(key) || doc_[key].is_null()) return std::nullopt;
    if (!doc_[key].is_number()) {
      throw Error(ErrorKind::schema, std::string("/") + key + ": expected a number");
    }
    return doc_[key].get<double>();
  }

  double required_number(const std::optional<double>& flag, const char* key) const {
    auto v = number(flag, key);
    if (!v) throw ParameterError(key, std::string("missing required parameter '") + key + "'");
    return *v;
  }

  std::optional<int> integer(const std::optional<int>& flag, const char* key) const {
    if (flag) return flag;
    if (!doc_.contains(key)) return std::nullopt;
    if (!doc_[key].is_number_integer()) {
      throw Error(ErrorKind::schema, std::string("/") + key + ": expected an integer");
    }
    return doc_[key].get<int>();
  }

  std::optional<std::filesystem::path> path(const std::optional<std::filesystem::path>& flag,
                                            const char* key) const {
    if (flag) return flag;
    if (!doc_.contains(key)) return std::nullopt;
    if (!doc_[key].is_string()) {
      throw Error(ErrorKind::schema, std::string("/") + key + ": expected a path string");
    }
    std::filesystem::path p = doc_[key].get<std::string>();
    if (p.is_relative() && rc_.config) p = rc_.config->parent_path() / p;
    return p;
  }

  std::filesystem::path required_path(const std::optional<std::filesystem::path>& flag,
                                      const char* key) const {
    auto p = path(flag, key);
    if (!p) throw ParameterError(key, std::string("missing required input '") + key + "'");
    return *p;
  }

  std::vector<double> radii() const {
    if (!rc_.radii.empty()) return rc_.radii;
    std::vector<double> out;
    if (doc_.contains("radii")) {
      for (const auto& r : doc_["radii"]) {
        if (!r.is_number()) throw Error(ErrorKind::schema, "/radii: expected numbers");
        out.push_back(r.get<double>());
      }
    }
    return out;
  }

  std::vector<PointId> points() const {
    if (!rc_.points.empty()) return rc_.points;
    std::vector<PointId> out;
    if (doc_.contains("points")) {
      for (const auto& p : doc_["points"]) {
        if (!p.is_number_unsigned()) throw Error(ErrorKind::schema, "/points: expected point ids");
        out.push_back(p.get<PointId>());
      }
    }
    return out;
  }

  std::optional<std::uint64_t> seed() const {
    if (rc_.seed) return rc_.seed;
    if (!doc_.contains("seed")) return std::nullopt;
    if (!doc_["seed"].is_number_unsigned()) throw Error(ErrorKind::schema, "/seed: expected an unsigned integer");
    return doc_["seed"].get<std::uint64_t>();
  }

  const RunConfig& rc() const { return rc_; }

 private:
  const RunConfig& rc_;
  json doc_;
};

std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
  std::filesystem::path p = out;
  p.replace_extension();
  return p.string() + suffix;
}

void emit(const json& report, const std::optional<std::filesystem::path>& out,
          std::ostream& stream) {
  const std::string text = io::dump(report);
  if (out) {
    io::write_text_file(*out, text);
  } else {
    stream << text;
  }
}

json round_report_json(const RoundReport& r) {
  json failures = json::array();
  for (const auto& f : r.coincidence_failures) {
    failures.push_back({{"point", f.point}, {"anchor", f.anchor}, {"k", f.k}});
  }
  return {
      {"n", r.n},
      {"membership", {{"ok", r.membership_ok}, {"worst_point", r.membership_worst},
                      {"distance", r.membership_distance}}},
      {"sup_change", {{"ok", r.sup_ok}, {"value", r.sup_change}, {"bound", r.sup_bound}}},
      {"strong_bound", {{"ok", r.strong_ok}, {"anchor", r.strong_anchor}, {"point", r.strong_point},
                        {"slack", std::isfinite(r.strong_slack) ? json(r.strong_slack) : json(nullptr)}}},
      {"coincidence", {{"ok", r.coincidence_ok}, {"failures", failures}}},
      {"ok", r.all_ok()},
  };
}

json audit_json(const SelectionAudit& audit) {
  json anchors = json::array();
  for (const auto& a : audit.anchors) {
    anchors.push_back({{"anchor", a.anchor}, {"first_round", a.first_round}, {"delta", a.delta},
                       {"threshold", a.threshold}, {"resolved", a.resolved},
                       {"estimate", a.estimate}, {"ok", a.ok}});
  }
  return {{"beta", audit.beta},
          {"covering_radius", audit.covering_radius},
          {"covering_bound", audit.covering_bound},
          {"unresolved", audit.unresolved()},
          {"anchors", anchors},
          {"ok", audit.all_ok()}};
}

void print_round_table(const std::vector<RoundReport>& reports, std::ostream& log) {
  auto mark = [](bool ok) { return ok ? "pass" : "FAIL"; };
  log << "round  membership   sup  strong  coincidence\n";
  for (const auto& r : reports) {
    log << std::setw(5) << r.n << "  " << std::setw(10) << mark(r.membership_ok) << "  "
        << std::setw(4) << mark(r.sup_ok) << "  " << std::setw(6) << mark(r.strong_ok) << "  "
        << std::setw(11) << mark(r.coincidence_ok) << "\n";
  }
}

int run_separate(const Params& p, std::ostream& report) {
  const auto space = io::space_from_json(io::read_json_file(p.required_path(p.rc().space, "space")));
  json out;
  bool ok = true;
  if (auto r = p.number(p.rc().r, "r")) {
    if (!(*r > 0.0)) throw ParameterError("r", "separation radius must be positive");
    const PointSet b = greedy_maximal_separation(space, *r, {});
    const double cover = covering_radius(space, b);
    ok = is_separation(space, b, *r) && cover < *r;
    out = {{"r", *r}, {"B", b}, {"covering_radius", cover}, {"ok", ok}};
  } else {
    const int n = p.integer(p.rc().rounds, "rounds").value_or(1);
    const auto h = build_separation_hierarchy(space, n);
    out = io::to_json(h);
    PointSet previous;
    for (std::size_t i = 0; i < h.rounds.size(); ++i) {
      const auto& round = h.rounds[i];
      const double cover = covering_radius(space, round.members);
      const bool nested = std::includes(round.members.begin(), round.members.end(),
                                        previous.begin(), previous.end());
      const bool round_ok = nested && is_separation(space, round.members, round.r) && cover < round.r;
      out["rounds"][i]["covering_radius"] = cover;
      out["rounds"][i]["ok"] = round_ok;
      ok = ok && round_ok;
      previous = round.members;
    }
    out["ok"] = ok;
  }
  emit(out, p.path(p.rc().out, "out"), report);
  return ok ? kOk : kChecksFailed;
}

IterationConfig iteration_config(const Params& p) {
  IterationConfig c;
  c.alpha = p.required_number(p.rc().alpha, "alpha");
  c.beta = p.required_number(p.rc().beta, "beta");
  c.epsilon = p.number(p.rc().epsilon, "epsilon");
  c.rounds = p.integer(p.rc().rounds, "rounds").value_or(4);
  c.delta_min = p.number(p.rc().delta_min, "delta_min").value_or(c.delta_min);
  c.tol = p.number(p.rc().tol, "tol").value_or(c.tol);
  if (p.doc().contains("r_b")) {
    const auto parsed = io::iteration_config_from_json(
        {{"alpha", c.alpha}, {"beta", c.beta}, {"rounds", c.rounds}, {"r_b", p.doc()["r_b"]}});
    c.default_locality_radius = parsed.default_locality_radius;
    c.locality_radii = parsed.locality_radii;
  }
  return c;
}

Selection initial_selection(const Params& p, const Correspondence& phi) {
  const auto n = static_cast<Eigen::Index>(phi.size());
  const auto d = static_cast<Eigen::Index>(phi.ambient_dim());
  Selection f0{Eigen::MatrixXd(n, d), 0};
  if (auto path = p.path(p.rc().f0, "f0_table")) {
    f0.values = io::table_from_json(io::read_json_file(*path));
  } else if (p.doc().contains("f0")) {
    const json& f0_doc = p.doc()["f0"];
    const std::string kind = f0_doc.value("kind", "");
    if (kind == "projection") {
      if (!f0_doc.contains("anchor") || !f0_doc["anchor"].is_array()) {
        throw Error(ErrorKind::schema, "/f0/anchor: expected an array of numbers");
      }
      Eigen::VectorXd anchor(static_cast<Eigen::Index>(f0_doc["anchor"].size()));
      for (std::size_t i = 0; i < f0_doc["anchor"].size(); ++i) {
        anchor(static_cast<Eigen::Index>(i)) = f0_doc["anchor"][i].get<double>();
      }
      for (PointId a = 0; a < phi.size(); ++a) {
        f0.values.row(static_cast<Eigen::Index>(a)) = project(phi.value(a), anchor).transpose();
      }
    } else if (kind == "table") {
      f0.values = io::table_from_json(f0_doc, "/f0");
    } else {
      throw Error(ErrorKind::schema, "/f0/kind: expected 'projection' or 'table'");
    }
  } else {
    throw ParameterError("f0", "an initial selection is required (--f0 or config 'f0')");
  }
  if (f0.values.rows() != n || f0.values.cols() != d) {
    throw Error(ErrorKind::schema, "/f0: table shape does not match the correspondence");
  }
  return f0;
}

int run_select(const Params& p, std::ostream& report, std::ostream& log) {
  const auto phi = io::correspondence_from_json(
      io::read_json_file(p.required_path(p.rc().correspondence, "correspondence")));
  const IterationConfig config = iteration_config(p);
  config.validate();
  const Selection f0 = initial_selection(p, phi);
  const SelectionSequence seq = run_iteration(phi, f0, config);

  std::vector<RoundReport> reports;
  json rounds = json::array();
  bool ok = true;
  for (int n = 1; n <= seq.round_count(); ++n) {
    reports.push_back(verify_round_properties(seq, phi, n));
    rounds.push_back(round_report_json(reports.back()));
    ok = ok && reports.back().all_ok();
  }
  const SelectionAudit audit = audit_limit_selection(seq, phi.space());
  ok = ok && audit.all_ok();
  print_round_table(reports, log);

  json out = io::to_json(seq);
  out["verification"] = {{"rounds", rounds}, {"audit", audit_json(audit)}, {"ok", ok}};
  const auto out_path = p.path(p.rc().out, "out");
  emit(out, out_path, report);
  if (out_path) {
    for (std::size_t i = 0; i < seq.selections.size(); ++i) {
      io::write_text_file(sibling(*out_path, ".f" + std::to_string(i) + ".csv"),
                          io::table_to_csv(seq.selections[i].values));
    }
  }
  return ok ? kOk : kChecksFailed;
}

int run_verify(const Params& p, std::ostream& report, std::ostream& log) {
  const auto phi = io::correspondence_from_json(
      io::read_json_file(p.required_path(p.rc().correspondence, "correspondence")));
  const SelectionSequence seq =
      io::sequence_from_json(io::read_json_file(p.required_path(p.rc().sequence, "sequence")));
  for (const auto& s : seq.selections) {
    if (s.size() != phi.size() || static_cast<std::size_t>(s.values.cols()) != phi.ambient_dim()) {
      throw Error(ErrorKind::schema, "/selections: table shape does not match the correspondence");
    }
  }
  std::vector<RoundReport> reports;
  json rounds = json::array();
  bool ok = true;
  for (int n = 1; n <= seq.round_count(); ++n) {
    reports.push_back(verify_round_properties(seq, phi, n));
    rounds.push_back(round_report_json(reports.back()));
    ok = ok && reports.back().all_ok();
  }
  print_round_table(reports, log);
  emit({{"rounds", rounds}, {"ok", ok}}, p.path(p.rc().out, "out"), report);
  return ok ? kOk : kChecksFailed;
}

int run_plip(const Params& p, std::ostream& report) {
  const auto space = io::space_from_json(io::read_json_file(p.required_path(p.rc().space, "space")));
  const Eigen::MatrixXd values =
      io::table_from_json(io::read_json_file(p.required_path(p.rc().values, "values")));
  if (static_cast<std::size_t>(values.rows()) != space.size()) {
    throw Error(ErrorKind::schema, "/values: one row per point is required");
  }
  std::vector<double> radii = p.radii();
  if (radii.empty()) radii = default_radii(space);
  PlipOptions options;
  options.k = p.integer(p.rc().k, "k").value_or(3);
  if (options.k < 1) throw ParameterError("k", "k must be at least 1");
  std::vector<PointId> points = p.points();
  if (points.empty()) {
    for (PointId a = 0; a < space.size(); ++a) points.push_back(a);
  }
  const auto alpha = p.number(p.rc().alpha, "alpha");
  const double tol = p.number(p.rc().tol, "tol").value_or(1e-9);

  std::vector<PlipProfile> profiles;
  json summary = json::object();
  bool ok = true;
  for (PointId b : points) {
    profiles.push_back(plip_profile(values, space, b, radii, options));
    summary[std::to_string(b)] = profiles.back().estimate;
    if (alpha) ok = ok && profiles.back().estimate <= *alpha + tol;
  }
  json out{{"estimates", summary}, {"k", options.k}, {"radii", radii}};
  if (alpha) out["alpha"] = *alpha;
  out["ok"] = ok;
  const auto out_path = p.path(p.rc().out, "out");
  emit(out, out_path, report);
  if (out_path) io::write_text_file(sibling(*out_path, ".csv"), io::profiles_to_csv(profiles));
  return ok ? kOk : kChecksFailed;
}

int run_bartle_graves(const Params& p, std::ostream& report) {
  const LinearSurjection t =
      io::surjection_from_json(io::read_json_file(p.required_path(p.rc().matrix, "matrix")));
  const double beta = p.required_number(p.rc().beta, "beta");
  SphereConfig sphere;
  sphere.count = p.integer(p.rc().sphere_count, "sphere_count").value_or(sphere.count);
  sphere.seed = p.seed().value_or(0);
  IterationConfig iteration;
  iteration.rounds = p.integer(p.rc().rounds, "rounds").value_or(4);
  iteration.epsilon = p.number(p.rc().epsilon, "epsilon");
  iteration.delta_min = p.number(p.rc().delta_min, "delta_min").value_or(iteration.delta_min);
  iteration.tol = p.number(p.rc().tol, "tol").value_or(iteration.tol);

  const RightInverse ri = build_right_inverse(t, beta, sphere, iteration);
  VerifyOptions options;
  options.seed = sphere.seed + 1;
  const RightInverseReport rep = verify_right_inverse(ri, options);

  json rounds = json::array();
  bool rounds_ok = true;
  for (int n = 1; n <= ri.sequence.round_count(); ++n) {
    const auto r = verify_round_properties(ri.sequence, ri.phi, n);
    rounds_ok = rounds_ok && r.all_ok();
    rounds.push_back(round_report_json(r));
  }
  json rays = json::array();
  for (const auto& r : rep.plip.rays) {
    rays.push_back({{"direction", r.ray.direction}, {"scale", r.ray.scale},
                    {"estimate", r.estimate}, {"bound", r.bound}, {"ok", r.ok}});
  }
  const bool ok = rep.all_ok() && rounds_ok;
  json out{
      {"gamma", ri.gamma},
      {"alpha", ri.alpha},
      {"beta", ri.beta},
      {"eta", ri.eta},
      {"epsilon", ri.sequence.epsilon},
      {"tail_bound", ri.tail_bound},
      {"dense_set", ri.dense_set},
      {"pseudo_inverse_gap", rep.pseudo_inverse_gap},
      {"checks",
       {{"right_inverse", {{"ok", rep.identity_ok}, {"residual", rep.identity_residual},
                           {"worst_direction", rep.identity_worst_direction},
                           {"worst_scale", rep.identity_worst_scale}}},
        {"off_sample", {{"ok", rep.off_sample_ok}, {"residual", rep.off_sample_residual},
                        {"identity_residual", rep.off_sample_identity_residual}}},
        {"homogeneity", {{"ok", rep.homogeneity_ok}, {"relative_error", rep.homogeneity_error}}},
        {"plip", {{"ok", rep.plip_ok}, {"bound", rep.plip.bound}, {"rays", rays},
                  {"sphere_audit", audit_json(rep.sphere_audit)}}},
        {"covering", {{"ok", rep.covering_ok}, {"radius", rep.covering_radius},
                      {"bound", rep.covering_bound}}},
        {"rounds", rounds}}},
      {"ok", ok},
  };
  const auto out_path = p.path(p.rc().out, "out");
  emit(out, out_path, report);
  if (out_path) {
    io::write_text_file(sibling(*out_path, ".tau.csv"), io::table_to_csv(ri.sphere.values()));
  }
  return ok ? kOk : kChecksFailed;
}

int exit_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::schema:
    case ErrorKind::identifier:
    case ErrorKind::shape:
    case ErrorKind::configuration:
      return kSchemaError;
    case ErrorKind::precondition:
    case ErrorKind::parameter:
    case ErrorKind::range:
    case ErrorKind::rank_deficiency:
      return kPreconditionError;
    case ErrorKind::convergence:
    case ErrorKind::degenerate_radius:
    case ErrorKind::rate:
    case ErrorKind::invariant:
    case ErrorKind::resolution:
      return kInternalError;
  }
  return kInternalError;
}

}  // namespace

int run(const RunConfig& config, std::ostream& report, std::ostream& log) {
  try {
    const Params params(config);
    if (config.command == "separate") return run_separate(params, report);
    if (config.command == "select") return run_select(params, report, log);
    if (config.command == "verify") return run_verify(params, report, log);
    if (config.command == "plip") return run_plip(params, report);
    if (config.command == "bartle-graves") return run_bartle_graves(params, report);
    log << "error: unknown command '" << config.command << "'\n";
    return kSchemaError;
  } catch (const ParameterError& e) {
    log << "error [parameter " << e.parameter() << "]: " << e.what() << "\n";
    return kPreconditionError;
  } catch (const Error& e) {
    log << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_status(e.kind());
  } catch (const io::json::exception& e) {
    log << "error [schema]: " << e.what() << "\n";
    return kSchemaError;
  }
}

}  // namespace lipselect::cli

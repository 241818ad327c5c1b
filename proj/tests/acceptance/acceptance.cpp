// Acceptance suite: one line per criterion, exit status 0 iff all pass.
// An optional argument names a file that receives the full JSON report.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "lipselect/bartle_graves.hpp"
#include "lipselect/io.hpp"

using namespace lipselect;
using io::json;

namespace {

struct Outcome {
  bool pass = true;
  json report = json::object();
};

constexpr double kSqrtHalf = 0.70710678118654752440;

// ---------------------------------------------------------------------------
// Instances

struct Instance {
  std::string name;
  Correspondence phi;
  Selection f0;
  IterationConfig config;
};

std::vector<double> segment(double lo, double hi, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * i / (n - 1));
  return xs;
}

// Inverse image of T = [1 1] over a grid of [-1, 1]; f0 is the projection of
// (1, 0) plus a kernel component wiggle * sin(freq * y).
Instance segment_instance(int points, int rounds, double beta, double wiggle, double freq) {
  const LinearSurjection t(Eigen::MatrixXd::Ones(1, 2));
  const auto ys = segment(-1.0, 1.0, points);
  auto phi = inverse_image_correspondence(t, SampledMetricSpace::on_line(ys));
  Selection f0{Eigen::MatrixXd(points, 2), 0};
  const Eigen::Vector2d anchor(1.0, 0.0);
  const Eigen::Vector2d kernel(kSqrtHalf, -kSqrtHalf);
  for (int i = 0; i < points; ++i) {
    const auto a = static_cast<PointId>(i);
    f0.values.row(i) = (project(phi.value(a), anchor) + wiggle * std::sin(freq * ys[a]) * kernel).transpose();
  }
  IterationConfig c;
  c.alpha = kSqrtHalf;
  c.beta = beta;
  c.rounds = rounds;
  return {"segment_T11_" + std::to_string(points), std::move(phi), std::move(f0), c};
}

// phi(a) = ball(A x_a, rho) with |A|_2 = alpha, which is lower pointwise
// alpha-Lipschitz; f0 winds around each ball at frequency omega drawn from
// [omega_lo, 3 omega_lo]. beta - alpha is drawn from [gap, gap + 0.4].
Instance ball_instance(std::uint64_t seed, int points, int dim, double extent, int rounds,
                       bool jittered_grid, double omega_lo, double gap) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(points, dim);
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < dim; ++j) {
      x(i, j) = jittered_grid ? extent * (i + 0.5 * u(rng)) / points : extent * u(rng);
    }
  }
  const double alpha = 0.5 + 0.5 * u(rng);
  const double rho = 0.2 + 0.2 * u(rng);
  const double omega = omega_lo * (1.0 + 2.0 * u(rng));
  Eigen::MatrixXd a(2, dim);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = g(rng);
  a *= alpha / Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);

  SampledMetricSpace space(MetricKind::l2, x);
  std::vector<ConvexBody> bodies;
  Selection f0{Eigen::MatrixXd(points, 2), 0};
  for (int i = 0; i < points; ++i) {
    const Eigen::VectorXd c = a * x.row(i).transpose();
    bodies.push_back(ConvexBody::ball(c, rho));
    const double phase = omega * x(i, 0);
    f0.values.row(i) = (c + 0.9 * rho * Eigen::Vector2d(std::cos(phase), std::sin(phase))).transpose();
  }
  IterationConfig config;
  config.alpha = alpha;
  config.beta = alpha + gap + 0.4 * u(rng);
  config.rounds = rounds;
  return {"balls_seed" + std::to_string(seed), Correspondence(std::move(space), std::move(bodies)),
          std::move(f0), config};
}

std::vector<Instance> iteration_instances() {
  std::vector<Instance> out;
  out.push_back(segment_instance(101, 4, 1.0, 0.0, 0.0));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    out.push_back(ball_instance(seed, 300, 2, 1.5, 5, false, 20.0, 0.6));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criteria

Outcome separation_suite() {
  Outcome out;
  json spaces = json::array();
  const MetricKind kinds[] = {MetricKind::l1, MetricKind::l2, MetricKind::linf};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const int n = 50 + static_cast<int>(seed) * 20;
    const int dim = 1 + static_cast<int>(seed % 5);
    Eigen::MatrixXd x(n, dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < dim; ++j) x(i, j) = u(rng);
    const SampledMetricSpace space(kinds[seed % 3], x);
    const auto h = build_separation_hierarchy(space, 6);
    bool nested = true, separated = true, covered = true;
    json covers = json::array();
    PointSet prev;
    for (int k = 1; k <= 6; ++k) {
      const auto& round = h.round(k);
      nested = nested && std::includes(round.members.begin(), round.members.end(), prev.begin(), prev.end());
      for (std::size_t i = 0; i < round.members.size(); ++i)
        for (std::size_t j = i + 1; j < round.members.size(); ++j)
          separated = separated && distance(space, round.members[i], round.members[j]) >= round.r;
      const double cover = covering_radius(space, round.members);
      covered = covered && cover < round.r;
      covers.push_back(cover);
      prev = round.members;
    }
    const bool ok = nested && separated && covered;
    out.pass = out.pass && ok;
    spaces.push_back({{"seed", seed}, {"points", n}, {"dim", dim},
                      {"metric", std::string(to_string(space.kind()))},
                      {"sizes", {h.round(1).members.size(), h.round(6).members.size()}},
                      {"covering_radii", covers}, {"ok", ok}});
  }
  out.report = {{"spaces", spaces}};
  return out;
}

Outcome round_suite() {
  Outcome out;
  json runs = json::array();
  for (const auto& inst : iteration_instances()) {
    const auto seq = run_iteration(inst.phi, inst.f0, inst.config);
    json rounds = json::array();
    for (int n = 1; n <= seq.round_count(); ++n) {
      const auto r = verify_round_properties(seq, inst.phi, n);
      const bool ok = r.sup_ok && r.strong_ok && r.coincidence_ok;
      out.pass = out.pass && ok;
      rounds.push_back({{"n", n},
                        {"anchors", seq.record(n).new_points.size()},
                        {"sup_change", r.sup_change},
                        {"sup_bound", r.sup_bound},
                        {"strong_slack", std::isfinite(r.strong_slack) ? json(r.strong_slack) : json(nullptr)},
                        {"coincidence_failures", r.coincidence_failures.size()},
                        {"ok", ok}});
    }
    runs.push_back({{"instance", inst.name}, {"epsilon", seq.epsilon}, {"rounds", rounds}});
  }
  out.report = {{"runs", runs}};
  return out;
}

Outcome closure_suite() {
  Outcome out;
  json runs = json::array();
  for (const auto& inst : iteration_instances()) {
    const auto seq = run_iteration(inst.phi, inst.f0, inst.config);
    const auto limit = limit_selection(seq);
    const int big_n = seq.round_count();
    bool member = true;
    std::vector<const Eigen::MatrixXd*> tables;
    for (const auto& s : seq.selections) tables.push_back(&s.values);
    tables.push_back(&limit.f.values);
    for (const auto* t : tables) {
      for (PointId a = 0; a < inst.phi.size(); ++a) {
        member = member && contains(inst.phi.value(a), t->row(static_cast<Eigen::Index>(a)).transpose(), 1e-8);
      }
    }
    // Telescoping: |f_N - f_m| <= sum_{j>m} sup_change_j <= 2^{-m} eps - 2^{-N} eps.
    bool telescopes = true;
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < big_n; ++m) {
      double recorded = 0.0;
      for (int j = m + 1; j <= big_n; ++j) recorded += seq.record(j).sup_change;
      double actual = 0.0;
      for (PointId a = 0; a < inst.phi.size(); ++a) {
        const auto i = static_cast<Eigen::Index>(a);
        actual = std::max(actual, (seq.f(big_n).values.row(i) - seq.f(m).values.row(i)).norm());
      }
      const double geometric = std::ldexp(seq.epsilon, -m) - std::ldexp(seq.epsilon, -big_n);
      telescopes = telescopes && actual <= recorded + 1e-12 && recorded <= geometric + 1e-12 * (big_n - m);
      worst_gap = std::max(worst_gap, actual - recorded);
    }
    double partial = 0.0;
    for (int j = 1; j <= big_n; ++j) partial += std::ldexp(seq.epsilon, -j);
    const bool tail_identity = std::abs(limit.tail_bound - (seq.epsilon - partial)) <= 1e-12;
    const bool ok = member && telescopes && tail_identity;
    out.pass = out.pass && ok;
    runs.push_back({{"instance", inst.name},
                    {"membership", member},
                    {"telescoping", telescopes},
                    {"worst_actual_minus_recorded", worst_gap},
                    {"tail_bound", limit.tail_bound},
                    {"tail_identity", tail_identity},
                    {"ok", ok}});
  }
  out.report = {{"runs", runs}};
  return out;
}

json audit_json(const SelectionAudit& audit) {
  double worst = 0.0;
  for (const auto& a : audit.anchors) worst = std::max(worst, a.estimate);
  return {{"beta", audit.beta},
          {"anchors", audit.anchors.size()},
          {"unresolved", audit.unresolved()},
          {"max_estimate", worst},
          {"covering_radius", audit.covering_radius},
          {"covering_bound", audit.covering_bound},
          {"ok", audit.all_ok()}};
}

Outcome audit_suite() {
  Outcome out;
  json runs = json::array();
  std::vector<Instance> instances;
  // The guaranteed radii lie below 2^{-K} < delta_b; the sample has to be
  // fine enough to put points there, so f0 varies slowly relative to eps.
  instances.push_back(segment_instance(2001, 4, 3.7, 0.1, 20.0));
  for (std::uint64_t seed = 11; seed <= 13; ++seed) {
    instances.push_back(ball_instance(seed, 1600, 1, 1.5, 4, true, 4.0, 3.0));
  }
  for (const auto& inst : instances) {
    const auto seq = run_iteration(inst.phi, inst.f0, inst.config);
    const auto audit = audit_limit_selection(seq, inst.phi.space(), 1e-6);
    // Every anchor must be resolved for the bound to say anything.
    const bool ok = audit.all_ok() && audit.unresolved() == 0;
    out.pass = out.pass && ok;
    json j = audit_json(audit);
    j["instance"] = inst.name;
    runs.push_back(j);
  }
  // The sphere of a Bartle-Graves run, densely sampled.
  Eigen::MatrixXd t(2, 3);
  t << 1.0, 0.3, -0.5, 0.2, 1.0, 0.4;
  const LinearSurjection ts(t);
  IterationConfig iteration;
  iteration.rounds = 4;
  const auto ri = build_right_inverse(ts, 1.5 / ts.sigma_min(), {2000, 0}, iteration);
  const auto audit = audit_limit_selection(ri.sequence, ri.sphere.directions(), 1e-6);
  const bool ok = audit.all_ok() && audit.unresolved() == 0;
  out.pass = out.pass && ok;
  json j = audit_json(audit);
  j["instance"] = "sphere_2x3_2000";
  runs.push_back(j);
  out.report = {{"runs", runs}};
  return out;
}

Outcome tightness_suite() {
  Outcome out;
  json cases = json::array();
  auto rays = [](const SphereTable& table) {
    std::vector<Ray> rs;
    for (PointId u = 0; u < table.directions().size(); u += 5) {
      for (double lambda : {0.5, 1.0, 2.0, 10.0}) {
        rs.push_back({u, lambda, {0.2 * lambda, 0.1 * lambda, 0.05 * lambda, 0.025 * lambda}});
      }
    }
    return rs;
  };
  for (int m : {2, 3}) {
    const auto dirs = sphere_sample(m, m == 2 ? 64 : 200, 7);
    Eigen::RowVectorXd c(3);
    c << 0.3, -1.2, 0.4;
    Eigen::MatrixXd values(static_cast<Eigen::Index>(dirs.size()), 3);
    values.rowwise() = c;
    const auto constant = verify_homogeneous_plip(SphereTable(dirs, values), 0.0, rays(SphereTable(dirs, values)));
    double worst_dev = 0.0;
    for (const auto& r : constant.rays) worst_dev = std::max(worst_dev, std::abs(r.estimate - c.norm()));
    const bool tight = worst_dev <= 1e-9 && std::abs(constant.bound - c.norm()) <= 1e-15;

    const SphereTable identity(dirs, dirs.coords());
    const auto id = verify_homogeneous_plip(identity, 1.0, rays(identity));
    double id_dev = 0.0;
    for (const auto& r : id.rays) id_dev = std::max(id_dev, std::abs(r.estimate - 1.0));
    const bool id_ok = id_dev <= 1e-9 && id.bound == 3.0 && id.all_ok();
    const bool ok = tight && constant.all_ok() && id_ok;
    out.pass = out.pass && ok;
    cases.push_back({{"m", m},
                     {"constant_norm", c.norm()},
                     {"constant_bound", constant.bound},
                     {"constant_max_deviation", worst_dev},
                     {"identity_bound", id.bound},
                     {"identity_max_deviation", id_dev},
                     {"rays", constant.rays.size()},
                     {"ok", ok}});
  }
  out.report = {{"cases", cases}};
  return out;
}

Outcome bartle_graves_suite() {
  Outcome out;
  json runs = json::array();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd random(2, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) random(i, j) = g(rng);
  const std::vector<std::pair<std::string, Eigen::MatrixXd>> cases{
      {"identity2", Eigen::MatrixXd::Identity(2, 2)},
      {"ones1x2", Eigen::MatrixXd::Ones(1, 2)},
      {"random2x4", random}};
  for (const auto& [name, m] : cases) {
    const LinearSurjection t(m);
    const double oracle_gamma = oracle::sigma_min_closed_form(m);
    IterationConfig iteration;
    iteration.rounds = 4;
    const double beta = 1.5 / t.sigma_min();
    const auto ri = build_right_inverse(t, beta, {256, 3}, iteration);
    VerifyOptions options;
    options.scales = {0.5, 1.0, 2.0, 10.0};
    const auto rep = verify_right_inverse(ri, options);
    bool rounds_ok = true;
    for (int n = 1; n <= ri.sequence.round_count(); ++n) {
      rounds_ok = rounds_ok && verify_round_properties(ri.sequence, ri.phi, n).all_ok();
    }
    double worst_plip = 0.0;
    for (const auto& r : rep.plip.rays) worst_plip = std::max(worst_plip, r.estimate);
    const bool gamma_ok = std::abs(ri.gamma - oracle_gamma) <= 1e-10;
    const bool ok = gamma_ok && rep.identity_ok && rep.homogeneity_ok && rep.plip.all_ok() &&
                    worst_plip <= ri.eta + 1e-6 && rounds_ok;
    out.pass = out.pass && ok;
    runs.push_back({{"matrix", name},
                    {"gamma", ri.gamma},
                    {"gamma_oracle", oracle_gamma},
                    {"beta", beta},
                    {"eta", ri.eta},
                    {"identity_residual", rep.identity_residual},
                    {"homogeneity_relative_error", rep.homogeneity_error},
                    {"rays", rep.plip.rays.size()},
                    {"max_ray_estimate", worst_plip},
                    {"off_sample_identity_residual", rep.off_sample_identity_residual},
                    {"pseudo_inverse_gap", rep.pseudo_inverse_gap},
                    {"rounds_ok", rounds_ok},
                    {"ok", ok}});
  }
  out.report = {{"runs", runs}};
  return out;
}

Outcome cantor_suite() {
  Outcome out;
  constexpr int kDepth = 20;
  // Complement points and their plateaus.
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, CantorGap>> picks;
  while (picks.size() < 50) {
    const double x = u(rng);
    const auto gap = cantor_gap(x, kDepth);
    if (gap && gap->half_width > 1e-6) picks.emplace_back(x, *gap);
  }
  std::vector<double> xs;
  for (int k = 0; k <= 1000; ++k) xs.push_back(k / 1000.0);
  const double fractions[] = {1.0 / 3.0, 1.0 / 5.0, 1.0 / 10.0, 1.0 / 20.0};
  std::vector<PointId> centers;
  for (const auto& [x, gap] : picks) {
    centers.push_back(xs.size());
    xs.push_back(x);
    for (double f : fractions) {
      xs.push_back(x - f * gap.half_width);
      xs.push_back(x + f * gap.half_width);
    }
  }
  // Duplicates would make the space degenerate.
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    out.pass = false;
    out.report = {{"error", "duplicate sample point"}};
    return out;
  }
  const auto space = SampledMetricSpace::on_line(xs);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) values(static_cast<Eigen::Index>(i), 0) = cantor_function(xs[i], kDepth);

  json points = json::array();
  bool zero = true;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double hw = picks[i].second.half_width;
    const std::vector<double> radii{hw / 2.0, hw / 4.0, hw / 8.0, hw / 16.0};
    const auto p = plip_profile(values, space, centers[i], radii);
    bool informative = true;
    for (const auto& row : p.rows) informative = informative && row.informative;
    const bool ok = p.estimate == 0.0 && informative;
    zero = zero && ok;
    points.push_back({{"x", picks[i].first}, {"level", picks[i].second.level},
                      {"half_width", hw}, {"estimate", p.estimate}, {"ok", ok}});
  }

  // Global check on the 3^{-6} grid.
  std::vector<double> grid;
  Eigen::MatrixXd gv(730, 1);
  for (int k = 0; k <= 729; ++k) {
    grid.push_back(k / 729.0);
    gv(k, 0) = cantor_function(grid.back(), kDepth);
  }
  const auto global = global_lipschitz_upgrade_check(grid, gv, 10.0, 0.01);
  const double span = grid[global.worst_j] - grid[global.worst_i];
  const bool witness_ok = !global.holds && global.worst_ratio > 10.0 &&
                          std::abs(global.worst_ratio - std::pow(1.5, 6)) <= 1e-9 &&
                          std::abs(span - 1.0 / 729.0) <= 1e-15 && grid[global.worst_j] <= 1.0 / 729.0 + 1e-15;
  out.pass = zero && witness_ok;
  out.report = {{"complement_points", points},
                {"global",
                 {{"alpha", 10.0},
                  {"holds", global.holds},
                  {"premise_holds", global.premise_holds},
                  {"worst_pair", {grid[global.worst_i], grid[global.worst_j]}},
                  {"worst_ratio", global.worst_ratio},
                  {"chain_slack", global.chain_slack},
                  {"ok", witness_ok}}}};
  return out;
}

Outcome projection_suite() {
  Outcome out;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 8);
  auto vec3 = [&] { return Eigen::Vector3d(g(rng), g(rng), g(rng)); };
  double worst_oracle = 0.0, worst_expansion = -1.0, worst_idem = 0.0;
  int pairs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd witness = vec3();
    std::vector<Halfspace> hs;
    const int m = count(rng);
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd n = vec3();
      hs.push_back({n, n.dot(witness) + std::abs(g(rng))});
    }
    const auto body = ConvexBody::polytope(hs, witness);
    std::vector<Eigen::VectorXd> ys, ps;
    for (int k = 0; k < 6; ++k) {
      const Eigen::VectorXd y = witness + 3.0 * Eigen::VectorXd(vec3());
      const Eigen::VectorXd p = project(body, y);
      const Eigen::VectorXd want = oracle::face_enumeration_projection(hs, y);
      worst_oracle = std::max(worst_oracle, (p - want).norm());
      worst_idem = std::max(worst_idem, (project(body, p) - p).norm());
      ys.push_back(y);
      ps.push_back(p);
    }
    for (std::size_t i = 0; i < ys.size(); ++i) {
      for (std::size_t j = i + 1; j < ys.size(); ++j) {
        worst_expansion = std::max(worst_expansion, (ps[i] - ps[j]).norm() - (ys[i] - ys[j]).norm());
        ++pairs;
      }
    }
  }
  out.pass = worst_oracle <= 1e-7 && worst_expansion <= 1e-9 && worst_idem <= 1e-9;
  out.report = {{"instances", 100},
                {"pairs", pairs},
                {"max_oracle_gap", worst_oracle},
                {"max_expansion", worst_expansion},
                {"max_idempotence_gap", worst_idem}};
  return out;
}

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> run;
};

Outcome guarded(const Criterion& c) {
  try {
    return c.run();
  } catch (const std::exception& e) {
    Outcome o;
    o.pass = false;
    o.report = {{"exception", e.what()}};
    return o;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "separation hierarchy (nesting, separation, covering)", separation_suite},
      {2, "round invariants: sup bound, strong bound, coincidence", round_suite},
      {3, "selection closure and telescoping tail bound", closure_suite},
      {4, "limit selection plip <= beta + 1e-6 on B_N, covering radius", audit_suite},
      {5, "homogeneous extension tightness", tightness_suite},
      {6, "Bartle-Graves right inverse", bartle_graves_suite},
      {7, "Cantor corpus", cantor_suite},
      {8, "polytope projection vs face enumeration", projection_suite},
  };

  json full = json::object();
  std::vector<std::string> first_pass;
  bool all = true;
  for (const auto& c : criteria) {
    const Outcome o = guarded(c);
    all = all && o.pass;
    full[std::to_string(c.id)] = {{"title", c.title}, {"pass", o.pass}, {"report", o.report}};
    first_pass.push_back(io::dump(o.report));
    std::printf("criterion %d %s  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str());
    std::fflush(stdout);
  }

  // Criterion 9: rerun every suite, sequentially this time, and compare bytes.
  const char* previous = std::getenv("LIPSELECT_THREADS");
  const std::string saved = previous ? previous : "";
  ::setenv("LIPSELECT_THREADS", "0", 1);
  json mismatches = json::array();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (io::dump(guarded(criteria[i]).report) != first_pass[i]) mismatches.push_back(criteria[i].id);
  }
  if (previous) {
    ::setenv("LIPSELECT_THREADS", saved.c_str(), 1);
  } else {
    ::unsetenv("LIPSELECT_THREADS");
  }
  const bool deterministic = mismatches.empty();
  all = all && deterministic;
  full["9"] = {{"title", "determinism"}, {"pass", deterministic}, {"mismatched_suites", mismatches}};
  std::printf("criterion 9 %s  determinism (byte-identical reports on rerun)\n", deterministic ? "PASS" : "FAIL");

  if (argc > 1) io::write_text_file(argv[1], io::dump(full));
  return all ? 0 : 1;
}

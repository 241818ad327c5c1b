#include "lipselect/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "lipselect/errors.hpp"

namespace lipselect {
namespace {

void check_radii(const std::vector<double>& radii) {
  if (radii.empty()) throw Error(ErrorKind::precondition, "radius schedule is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw Error(ErrorKind::precondition, "radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) {
      throw Error(ErrorKind::precondition, "radii must be strictly decreasing");
    }
  }
}

bool in_ball(double d, double r, bool closed) { return closed ? d <= r : d < r; }

}  // namespace

PlipProfile plip_profile_cloud(const Eigen::VectorXd& base_value,
                               const std::vector<std::pair<double, Eigen::VectorXd>>& cloud,
                               const std::vector<double>& radii, const PlipOptions& options) {
  check_radii(radii);
  if (options.k < 1) throw Error(ErrorKind::precondition, "k must be at least 1");
  PlipProfile profile;
  profile.rows.reserve(radii.size());
  for (double r : radii) {
    PlipRow row{r, 0.0, false};
    double sup = 0.0;
    for (const auto& [d, value] : cloud) {
      if (!in_ball(d, r, options.closed)) continue;
      if (d > 0.0) row.informative = true;
      sup = std::max(sup, (base_value - value).norm());
    }
    row.ratio = sup / r;
    profile.rows.push_back(row);
  }
  int used = 0;
  for (auto it = profile.rows.rbegin(); it != profile.rows.rend() && used < options.k; ++it) {
    if (!it->informative) continue;
    profile.estimate = std::max(profile.estimate, it->ratio);
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorKind::resolution, "no radius yields a ball with a second sample point");
  }
  return profile;
}

PlipProfile plip_profile(const Eigen::MatrixXd& f, const SampledMetricSpace& space, PointId b,
                         const std::vector<double>& radii, const PlipOptions& options) {
  space.check_id(b);
  if (static_cast<std::size_t>(f.rows()) != space.size()) {
    throw Error(ErrorKind::shape, "function table does not match the space");
  }
  std::vector<std::pair<double, Eigen::VectorXd>> cloud;
  const double largest = radii.empty() ? 0.0 : radii.front();
  for (PointId a = 0; a < space.size(); ++a) {
    const double d = distance(space, a, b);
    if (d <= largest) cloud.emplace_back(d, f.row(static_cast<Eigen::Index>(a)).transpose());
  }
  PlipProfile profile = plip_profile_cloud(f.row(static_cast<Eigen::Index>(b)).transpose(),
                                           cloud, radii, options);
  profile.point = b;
  return profile;
}

std::vector<double> default_radii(const SampledMetricSpace& space, int levels) {
  const double anchor = fill_distance(space);
  if (!(anchor > 0.0)) throw Error(ErrorKind::resolution, "space has a single point");
  std::vector<double> radii;
  for (int j = 0; j < levels; ++j) radii.push_back(std::ldexp(anchor, 3 - j));
  return radii;
}

OpenClosedReport open_closed_consistency(const Eigen::MatrixXd& f,
                                         const SampledMetricSpace& space, PointId b,
                                         const std::vector<double>& radii, int k,
                                         double rel_tol, double abs_tol) {
  OpenClosedReport report;
  report.closed_estimate = plip_profile(f, space, b, radii, {k, true}).estimate;
  report.open_estimate = plip_profile(f, space, b, radii, {k, false}).estimate;
  const double scale = std::max(report.closed_estimate, report.open_estimate);
  report.consistent =
      std::abs(report.closed_estimate - report.open_estimate) <= rel_tol * scale + abs_tol;
  return report;
}

SphereTable::SphereTable(SampledMetricSpace directions, Eigen::MatrixXd values)
    : directions_(std::move(directions)), values_(std::move(values)) {
  if (directions_.size() == 0) {
    throw Error(ErrorKind::configuration, "sphere table is empty");
  }
  if (!directions_.has_coords() || directions_.kind() != MetricKind::l2) {
    throw Error(ErrorKind::configuration, "sphere directions must be Euclidean coordinates");
  }
  if (static_cast<std::size_t>(values_.rows()) != directions_.size()) {
    throw Error(ErrorKind::shape, "sphere table needs one value per direction");
  }
}

PointId SphereTable::nearest_direction(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (static_cast<std::size_t>(u.size()) != ambient_dim()) {
    throw Error(ErrorKind::shape, "direction has the wrong dimension");
  }
  const auto& c = directions_.coords();
  PointId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const double d = (c.row(i).transpose() - u).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<PointId>(i);
    }
  }
  return best;
}

double SphereTable::sup_norm() const { return values_.rowwise().norm().maxCoeff(); }

Eigen::VectorXd homogeneous_extension(const SphereTable& table,
                                      const Eigen::Ref<const Eigen::VectorXd>& z) {
  if (static_cast<std::size_t>(z.size()) != table.ambient_dim()) {
    throw Error(ErrorKind::shape, "argument has the wrong dimension");
  }
  const double norm = z.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.codomain_dim()));
  const PointId u = table.nearest_direction(z / norm);
  return norm * table.values().row(static_cast<Eigen::Index>(u)).transpose();
}

bool HomogeneousPlipReport::all_ok() const {
  return std::all_of(rays.begin(), rays.end(), [](const RayPlipResult& r) { return r.ok; });
}

HomogeneousPlipReport verify_homogeneous_plip(const SphereTable& table, double beta,
                                              const std::vector<Ray>& rays, double tol, int k) {
  HomogeneousPlipReport report;
  report.beta = beta;
  report.sup_norm = table.sup_norm();
  report.bound = 2.0 * beta + report.sup_norm;
  const auto& dirs = table.directions();
  constexpr double kEdge = 1.0 - 1e-12;
  const double offsets[] = {0.0, 0.5, -0.5, kEdge, -kEdge};

  for (const Ray& ray : rays) {
    dirs.check_id(ray.direction);
    if (!(ray.scale > 0.0)) throw Error(ErrorKind::precondition, "ray scale must be positive");
    check_radii(ray.radii);
    const Eigen::VectorXd b = dirs.point(ray.direction);
    const Eigen::VectorXd z = ray.scale * b;
    const Eigen::VectorXd base_value = homogeneous_extension(table, z);

    std::vector<std::pair<double, Eigen::VectorXd>> cloud;
    for (double s : ray.radii) {
      const double angular = 2.0 * s / ray.scale;
      for (PointId u = 0; u < dirs.size(); ++u) {
        const Eigen::VectorXd dir = dirs.point(u);
        if ((dir - b).norm() > angular) continue;
        for (double t : offsets) {
          const Eigen::VectorXd x = (ray.scale + t * s) * dir;
          cloud.emplace_back((x - z).norm(), homogeneous_extension(table, x));
        }
      }
    }

    RayPlipResult result;
    result.ray = ray;
    result.bound = report.bound;
    result.estimate = plip_profile_cloud(base_value, cloud, ray.radii, {k, true}).estimate;
    std::vector<double> sphere_radii;
    for (double s : ray.radii) sphere_radii.push_back(2.0 * s / ray.scale);
    try {
      result.sphere_estimate =
          plip_profile(table.values(), dirs, ray.direction, sphere_radii, {k, true}).estimate;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resolution) throw;
    }
    result.ok = result.estimate <= report.bound + tol;
    report.rays.push_back(std::move(result));
  }
  return report;
}

namespace {

// Next ternary digit of frac in [0, 1). The product 3 * frac is rounded
// once; the subtraction is exact.
int next_digit(double& frac) {
  const double t = 3.0 * frac;
  const int digit = t >= 2.0 ? 2 : (t >= 1.0 ? 1 : 0);
  frac = t - digit;
  return digit;
}

}  // namespace

double cantor_function(double x, int depth) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorKind::range, "Cantor function argument must lie in [0, 1]");
  }
  if (depth < 1 || depth > 40) throw Error(ErrorKind::range, "depth must lie in [1, 40]");
  if (x == 1.0) return 1.0;
  double frac = x;
  double result = 0.0;
  double place = 0.5;
  for (int i = 0; i < depth && frac != 0.0; ++i) {
    const int digit = next_digit(frac);
    if (digit == 1) return result + place;
    if (digit == 2) result += place;
    place *= 0.5;
  }
  return result;
}

std::optional<CantorGap> cantor_gap(double x, int depth) {
  if (!(x > 0.0 && x < 1.0)) return std::nullopt;
  if (depth < 1 || depth > 40) throw Error(ErrorKind::range, "depth must lie in [1, 40]");
  double frac = x;
  double left = 0.0;
  double third = 1.0;
  for (int level = 1; level <= depth && frac != 0.0; ++level) {
    third /= 3.0;
    const int digit = next_digit(frac);
    if (digit == 1) {
      if (frac == 0.0) return std::nullopt;  // left endpoint, a Cantor point
      CantorGap gap;
      gap.level = level;
      gap.left = left + third;
      gap.right = left + 2.0 * third;
      gap.half_width = std::min(x - gap.left, gap.right - x);
      gap.value = cantor_function(x, depth);
      if (!(gap.half_width > 0.0)) return std::nullopt;
      return gap;
    }
    left += digit * third;
  }
  return std::nullopt;
}

GlobalLipschitzReport global_lipschitz_upgrade_check(const std::vector<double>& xs,
                                                     const Eigen::MatrixXd& f, double alpha,
                                                     double r0, double tol) {
  if (static_cast<std::size_t>(f.rows()) != xs.size()) {
    throw Error(ErrorKind::shape, "function table does not match the grid");
  }
  if (xs.size() < 2) throw Error(ErrorKind::precondition, "grid needs two points");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw Error(ErrorKind::precondition, "grid must be increasing");
    if (!(xs[i] - xs[i - 1] < r0)) {
      throw Error(ErrorKind::precondition, "grid spacing must be below r0");
    }
  }
  const double rate = alpha + tol;
  GlobalLipschitzReport report;
  report.premise_holds = true;
  report.holds = true;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double step = xs[i] - xs[i - 1];
    const double df = (f.row(static_cast<Eigen::Index>(i)) - f.row(static_cast<Eigen::Index>(i - 1))).norm();
    report.chain_slack += std::max(0.0, df - rate * step);
  }
  bool have_worst = false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double dx = xs[j] - xs[i];
      const double df = (f.row(static_cast<Eigen::Index>(i)) - f.row(static_cast<Eigen::Index>(j))).norm();
      const bool ok = df <= rate * dx;
      if (!ok) {
        report.holds = false;
        if (dx <= r0) report.premise_holds = false;
      }
      const double ratio = df / dx;
      if (!have_worst || ratio > report.worst_ratio * (1.0 + 1e-12)) {
        report.worst_ratio = ratio;
        report.worst_i = i;
        report.worst_j = j;
        have_worst = true;
      }
    }
  }
  if (report.premise_holds && !report.holds) {
    throw Error(ErrorKind::invariant, "local bound holds but the chained bound fails");
  }
  return report;
}

std::vector<double> threshold_radii(double threshold, int levels) {
  std::vector<double> radii;
  for (int j = 0; j < levels; ++j) radii.push_back(0.75 * std::ldexp(threshold, -j));
  return radii;
}

double anchor_threshold(int first_round, double delta) {
  int k = first_round;
  while (!(std::ldexp(1.0, -k) < delta)) ++k;
  return std::ldexp(1.0, -k);
}

std::size_t SelectionAudit::unresolved() const {
  return static_cast<std::size_t>(std::count_if(
      anchors.begin(), anchors.end(), [](const AnchorAudit& a) { return !a.resolved; }));
}

bool SelectionAudit::all_ok() const {
  return covering_radius < covering_bound &&
         std::all_of(anchors.begin(), anchors.end(), [](const AnchorAudit& a) { return a.ok; });
}

SelectionAudit audit_limit_selection(const SelectionSequence& seq,
                                     const SampledMetricSpace& space, double tol, int k,
                                     int levels) {
  const auto limit = limit_selection(seq);
  const int n_rounds = seq.round_count();
  SelectionAudit audit;
  audit.beta = seq.config.beta;
  const PointSet& members = seq.hierarchy.round(n_rounds).members;
  audit.covering_radius = covering_radius(space, members);
  audit.covering_bound = std::ldexp(1.0, -(n_rounds - 1));
  for (PointId b : members) {
    AnchorAudit a;
    a.anchor = b;
    a.first_round = seq.hierarchy.first_round_of(b);
    a.delta = seq.record(a.first_round).deltas.at(b);
    a.threshold = anchor_threshold(a.first_round, a.delta);
    try {
      a.estimate = plip_profile(limit.f.values, space, b, threshold_radii(a.threshold, levels),
                                {k, true})
                       .estimate;
      a.resolved = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resolution) throw;
    }
    a.ok = a.estimate <= audit.beta + tol;
    audit.anchors.push_back(a);
  }
  return audit;
}

}  // namespace lipselect

#include "lipselect/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lipselect/errors.hpp"

namespace lipselect {

MetricKind parse_metric_kind(std::string_view name) {
  if (name == "l1") return MetricKind::l1;
  if (name == "l2") return MetricKind::l2;
  if (name == "linf") return MetricKind::linf;
  if (name == "explicit") return MetricKind::explicit_matrix;
  throw Error(ErrorKind::configuration, "unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::l1: return "l1";
    case MetricKind::l2: return "l2";
    case MetricKind::linf: return "linf";
    case MetricKind::explicit_matrix: return "explicit";
  }
  return "l2";
}

double metric_norm(MetricKind kind, const Eigen::Ref<const Eigen::VectorXd>& v) {
  switch (kind) {
    case MetricKind::l1: return v.lpNorm<1>();
    case MetricKind::l2: return v.norm();
    case MetricKind::linf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
    case MetricKind::explicit_matrix: break;
  }
  throw Error(ErrorKind::configuration, "explicit metric has no coordinate norm");
}

SampledMetricSpace::SampledMetricSpace(MetricKind kind, Eigen::MatrixXd coords)
    : kind_(kind), size_(static_cast<std::size_t>(coords.rows())) {
  if (kind == MetricKind::explicit_matrix) {
    throw Error(ErrorKind::configuration,
                "explicit metric requires a distance matrix, not coordinates");
  }
  coords_ = std::move(coords);
  // d(a,b) > 0 for distinct points.
  for (std::size_t a = 0; a < size_; ++a) {
    for (std::size_t b = a + 1; b < size_; ++b) {
      if (distance(*this, a, b) <= 0.0) {
        throw Error(ErrorKind::configuration,
                    "points " + std::to_string(a) + " and " + std::to_string(b) +
                        " coincide");
      }
    }
  }
}

SampledMetricSpace SampledMetricSpace::from_distances(Eigen::MatrixXd distances) {
  if (distances.rows() != distances.cols()) {
    throw Error(ErrorKind::configuration, "distance matrix must be square");
  }
  const auto n = distances.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0) {
      throw Error(ErrorKind::configuration, "distance matrix diagonal must be zero");
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (distances(i, j) != distances(j, i)) {
        throw Error(ErrorKind::configuration, "distance matrix must be symmetric");
      }
      if (!(distances(i, j) > 0.0) || !std::isfinite(distances(i, j))) {
        throw Error(ErrorKind::configuration,
                    "off-diagonal distances must be positive and finite");
      }
    }
  }
  SampledMetricSpace space;
  space.kind_ = MetricKind::explicit_matrix;
  space.size_ = static_cast<std::size_t>(n);
  space.distances_ = std::move(distances);
  return space;
}

SampledMetricSpace SampledMetricSpace::on_line(const std::vector<double>& xs) {
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) coords(static_cast<Eigen::Index>(i), 0) = xs[i];
  return SampledMetricSpace(MetricKind::l2, std::move(coords));
}

std::size_t SampledMetricSpace::dimension() const noexcept {
  return coords_ ? static_cast<std::size_t>(coords_->cols()) : 0;
}

const Eigen::MatrixXd& SampledMetricSpace::coords() const {
  if (!coords_) throw Error(ErrorKind::configuration, "space has no coordinates");
  return *coords_;
}

Eigen::VectorXd SampledMetricSpace::point(PointId id) const {
  check_id(id);
  return coords().row(static_cast<Eigen::Index>(id)).transpose();
}

void SampledMetricSpace::check_id(PointId id) const {
  if (id >= size_) {
    throw Error(ErrorKind::identifier, "unknown point id " + std::to_string(id));
  }
}

double distance(const SampledMetricSpace& space, PointId a, PointId b) {
  space.check_id(a);
  space.check_id(b);
  if (a == b) return 0.0;
  const auto ia = static_cast<Eigen::Index>(a);
  const auto ib = static_cast<Eigen::Index>(b);
  if (space.kind() == MetricKind::explicit_matrix) {
    const auto& m = space.explicit_distances();
    if (!m) throw Error(ErrorKind::configuration, "explicit metric without matrix");
    return (*m)(ia, ib);
  }
  const auto& c = space.coords();
  return metric_norm(space.kind(), (c.row(ia) - c.row(ib)).transpose());
}

PointSet ball_points(const SampledMetricSpace& space, PointId center, double r,
                     bool closed) {
  space.check_id(center);
  if (!(r > 0.0)) throw Error(ErrorKind::precondition, "ball radius must be positive");
  PointSet out;
  for (PointId a = 0; a < space.size(); ++a) {
    const double d = distance(space, center, a);
    if (closed ? d <= r : d < r) out.push_back(a);
  }
  return out;
}

bool is_separation(const SampledMetricSpace& space, const PointSet& set, double r) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      if (set[i] == set[j] || distance(space, set[i], set[j]) < r) return false;
    }
  }
  return true;
}

PointSet greedy_maximal_separation(const SampledMetricSpace& space, double r,
                                   const PointSet& seed) {
  if (!(r > 0.0)) throw Error(ErrorKind::precondition, "separation radius must be positive");
  for (PointId id : seed) space.check_id(id);
  if (!is_separation(space, seed, r)) {
    throw Error(ErrorKind::precondition, "seed is not an r-separation");
  }
  std::vector<bool> member(space.size(), false);
  PointSet current = seed;
  for (PointId id : seed) member[id] = true;
  for (PointId a = 0; a < space.size(); ++a) {
    if (member[a]) continue;
    const bool far = std::all_of(current.begin(), current.end(), [&](PointId b) {
      return distance(space, a, b) >= r;
    });
    if (far) {
      current.push_back(a);
      member[a] = true;
    }
  }
  std::sort(current.begin(), current.end());
  return current;
}

double covering_radius(const SampledMetricSpace& space, const PointSet& set) {
  if (set.empty()) throw Error(ErrorKind::precondition, "covering radius of an empty set");
  for (PointId id : set) space.check_id(id);
  double worst = 0.0;
  for (PointId a = 0; a < space.size(); ++a) {
    double nearest = std::numeric_limits<double>::infinity();
    for (PointId b : set) nearest = std::min(nearest, distance(space, a, b));
    worst = std::max(worst, nearest);
  }
  return worst;
}

double diameter(const SampledMetricSpace& space) {
  double out = 0.0;
  for (PointId a = 0; a < space.size(); ++a) {
    for (PointId b = a + 1; b < space.size(); ++b) out = std::max(out, distance(space, a, b));
  }
  return out;
}

double nearest_neighbor_distance(const SampledMetricSpace& space, PointId id) {
  space.check_id(id);
  double out = std::numeric_limits<double>::infinity();
  for (PointId a = 0; a < space.size(); ++a) {
    if (a != id) out = std::min(out, distance(space, id, a));
  }
  return out;
}

double fill_distance(const SampledMetricSpace& space) {
  if (space.size() < 2) return 0.0;
  double out = 0.0;
  for (PointId a = 0; a < space.size(); ++a) {
    out = std::max(out, nearest_neighbor_distance(space, a));
  }
  return out;
}

const SeparationRound& SeparationHierarchy::round(int n) const {
  if (n < 1 || n > static_cast<int>(rounds.size())) {
    throw Error(ErrorKind::precondition, "round " + std::to_string(n) + " does not exist");
  }
  return rounds[static_cast<std::size_t>(n - 1)];
}

PointSet SeparationHierarchy::new_points(int n) const {
  const PointSet& current = round(n).members;
  if (n == 1) return current;
  const PointSet& previous = round(n - 1).members;
  PointSet out;
  std::set_difference(current.begin(), current.end(), previous.begin(), previous.end(),
                      std::back_inserter(out));
  return out;
}

int SeparationHierarchy::first_round_of(PointId id) const {
  for (const auto& r : rounds) {
    if (std::binary_search(r.members.begin(), r.members.end(), id)) return r.n;
  }
  return 0;
}

SeparationHierarchy build_separation_hierarchy(const SampledMetricSpace& space,
                                               int rounds) {
  if (rounds < 1) throw ParameterError("rounds", "number of rounds must be at least 1");
  SeparationHierarchy h;
  PointSet previous;
  for (int n = 1; n <= rounds; ++n) {
    const double r = std::ldexp(1.0, -(n - 1));
    previous = greedy_maximal_separation(space, r, previous);
    h.rounds.push_back({n, r, previous});
  }
  return h;
}

std::optional<std::array<PointId, 3>> find_triangle_violation(
    const SampledMetricSpace& space, double tol) {
  const std::size_t n = space.size();
  for (PointId a = 0; a < n; ++a) {
    for (PointId b = 0; b < n; ++b) {
      for (PointId c = 0; c < n; ++c) {
        if (distance(space, a, c) > distance(space, a, b) + distance(space, b, c) + tol) {
          return std::array<PointId, 3>{a, b, c};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace lipselect

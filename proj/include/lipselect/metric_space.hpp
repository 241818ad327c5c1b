#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace lipselect {

/// Index of a point inside a SampledMetricSpace; ids are 0..size()-1 in
/// insertion order, and that order is the canonical scan order everywhere.
using PointId = std::size_t;
using PointSet = std::vector<PointId>;

enum class MetricKind { l1, l2, linf, explicit_matrix };

MetricKind parse_metric_kind(std::string_view name);
std::string_view to_string(MetricKind kind) noexcept;

/// A finite metric space: either points in R^m with a norm-induced metric,
/// or an explicit symmetric distance matrix.
class SampledMetricSpace {
 public:
  /// Rows of `coords` are the points. Distinct rows are required.
  SampledMetricSpace(MetricKind kind, Eigen::MatrixXd coords);

  /// Explicit metric. The matrix must be square, symmetric, zero on the
  /// diagonal and positive off it.
  static SampledMetricSpace from_distances(Eigen::MatrixXd distances);

  /// Convenience for 1-D samples ("line spaces").
  static SampledMetricSpace on_line(const std::vector<double>& xs);

  std::size_t size() const noexcept { return size_; }
  MetricKind kind() const noexcept { return kind_; }
  bool has_coords() const noexcept { return coords_.has_value(); }
  /// Ambient dimension of the coordinates, 0 for explicit spaces.
  std::size_t dimension() const noexcept;

  const Eigen::MatrixXd& coords() const;
  Eigen::VectorXd point(PointId id) const;
  const std::optional<Eigen::MatrixXd>& explicit_distances() const noexcept {
    return distances_;
  }

  void check_id(PointId id) const;

 private:
  SampledMetricSpace() = default;

  MetricKind kind_ = MetricKind::l2;
  std::size_t size_ = 0;
  std::optional<Eigen::MatrixXd> coords_;
  std::optional<Eigen::MatrixXd> distances_;
};

double distance(const SampledMetricSpace& space, PointId a, PointId b);

/// Norm of a vector under the given coordinate metric.
double metric_norm(MetricKind kind, const Eigen::Ref<const Eigen::VectorXd>& v);

/// Points a with d(center, a) < r (open) or <= r (closed), in id order.
PointSet ball_points(const SampledMetricSpace& space, PointId center, double r,
                     bool closed);

bool is_separation(const SampledMetricSpace& space, const PointSet& set, double r);

/// Extends `seed` to a maximal r-separation by scanning ids in order and
/// admitting every point at distance >= r from all current members.
/// Returns ids sorted ascending.
PointSet greedy_maximal_separation(const SampledMetricSpace& space, double r,
                                   const PointSet& seed);

/// max_a min_{b in set} d(a, b).
double covering_radius(const SampledMetricSpace& space, const PointSet& set);

/// Largest distance between any two points.
double diameter(const SampledMetricSpace& space);

/// Distance from `id` to its nearest other point (infinity for singletons).
double nearest_neighbor_distance(const SampledMetricSpace& space, PointId id);

/// Largest nearest-neighbour distance over the space (the covering radius of
/// the sample by its own points). Zero for singletons.
double fill_distance(const SampledMetricSpace& space);

struct SeparationRound {
  int n = 0;
  double r = 0.0;
  PointSet members;
};

/// Nested maximal separations B_1 ⊆ ... ⊆ B_N with radii r_n = 2^{-(n-1)}.
struct SeparationHierarchy {
  std::vector<SeparationRound> rounds;

  const SeparationRound& round(int n) const;
  /// B_n \ B_{n-1}
  PointSet new_points(int n) const;
  /// First round whose separation contains `id`, or 0 if none.
  int first_round_of(PointId id) const;
};

SeparationHierarchy build_separation_hierarchy(const SampledMetricSpace& space,
                                               int rounds);

/// Exhaustive triangle-inequality scan; returns the first violating triple
/// (a, b, c) with d(a,c) > d(a,b) + d(b,c) + tol, if any.
std::optional<std::array<PointId, 3>> find_triangle_violation(
    const SampledMetricSpace& space, double tol = 0.0);

}  // namespace lipselect

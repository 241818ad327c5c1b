#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lipselect/metric_space.hpp"
#include "lipselect/selection.hpp"

namespace lipselect {

struct PlipRow {
  double r = 0.0;
  double ratio = 0.0;
  /// The ball holds a point other than the base point.
  bool informative = false;
};

/// Ratios r^{-1} max_{a in ball(b, r)} ||f(b) - f(a)|| over a radius schedule.
/// `estimate` is the largest ratio among the `k` smallest informative radii;
/// it stands in for the small-radius limsup and is only as good as the
/// sample's resolution.
struct PlipProfile {
  PointId point = 0;
  std::vector<PlipRow> rows;  // decreasing r
  double estimate = 0.0;
};

struct PlipOptions {
  int k = 3;
  bool closed = true;
};

/// Rows of `f` are the function values on `space`. Radii must be strictly
/// decreasing and positive. Throws a resolution error when no radius gives
/// a ball with a second point.
PlipProfile plip_profile(const Eigen::MatrixXd& f, const SampledMetricSpace& space, PointId b,
                         const std::vector<double>& radii, const PlipOptions& options = {});

/// Same quantity on an arbitrary cloud: each entry is (distance to the base
/// point, value).
PlipProfile plip_profile_cloud(const Eigen::VectorXd& base_value,
                               const std::vector<std::pair<double, Eigen::VectorXd>>& cloud,
                               const std::vector<double>& radii, const PlipOptions& options = {});

/// Geometric radii (factor 1/2) from 8x the space's fill distance down to
/// 1/16 of it.
std::vector<double> default_radii(const SampledMetricSpace& space, int levels = 8);

struct OpenClosedReport {
  bool consistent = false;
  double closed_estimate = 0.0;
  double open_estimate = 0.0;
};

/// Compares the closed-ball and open-ball estimates:
/// |closed - open| <= rel_tol * max(closed, open) + abs_tol.
OpenClosedReport open_closed_consistency(const Eigen::MatrixXd& f,
                                         const SampledMetricSpace& space, PointId b,
                                         const std::vector<double>& radii, int k = 3,
                                         double rel_tol = 0.1, double abs_tol = 1e-9);

/// A function sampled on unit directions of R^m.
class SphereTable {
 public:
  SphereTable(SampledMetricSpace directions, Eigen::MatrixXd values);

  const SampledMetricSpace& directions() const noexcept { return directions_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::MatrixXd& mutable_values() noexcept { return values_; }
  std::size_t codomain_dim() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  std::size_t ambient_dim() const noexcept { return directions_.dimension(); }

  /// Nearest sampled direction to u (Euclidean, ties to the lower id).
  PointId nearest_direction(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  /// max over the sample of ||value||
  double sup_norm() const;

 private:
  SampledMetricSpace directions_;
  Eigen::MatrixXd values_;
};

/// rho(z) = ||z|| * rho_sphere(z / ||z||), rho(0) = 0; off-sample directions
/// take the value of the nearest sampled direction.
Eigen::VectorXd homogeneous_extension(const SphereTable& table,
                                      const Eigen::Ref<const Eigen::VectorXd>& z);

struct Ray {
  PointId direction = 0;
  double scale = 1.0;
  /// Absolute radii around scale * direction, strictly decreasing.
  std::vector<double> radii;
};

struct RayPlipResult {
  Ray ray;
  /// Sphere-side estimate at radii 2 s / scale; nullopt when unresolved.
  std::optional<double> sphere_estimate;
  double estimate = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct HomogeneousPlipReport {
  double beta = 0.0;
  double sup_norm = 0.0;
  double bound = 0.0;  // 2 beta + sup_norm
  std::vector<RayPlipResult> rays;
  bool all_ok() const;
};

/// Estimates the extension's pointwise constant at each ray point and checks
/// it against 2 beta + ||rho_sphere||_inf + tol. The probe cloud around
/// z = scale * b consists of mu * u for sampled directions u and
/// mu in scale + s * {0, +-1/2, +-(1 - 1e-12)}.
HomogeneousPlipReport verify_homogeneous_plip(const SphereTable& table, double beta,
                                              const std::vector<Ray>& rays, double tol = 1e-6,
                                              int k = 3);

/// Cantor function via exact ternary digit extraction of the double x,
/// truncated after `depth` digits (accurate to 2^{-depth}).
double cantor_function(double x, int depth);

/// The removed middle-third interval (level <= depth) containing x, if any.
struct CantorGap {
  int level = 0;
  double left = 0.0;
  double right = 0.0;
  double half_width = 0.0;  // distance from x to the nearer endpoint
  double value = 0.0;       // the plateau value
};
std::optional<CantorGap> cantor_gap(double x, int depth);

struct GlobalLipschitzReport {
  /// Every pair within r0 satisfies ||f(x)-f(y)|| <= (alpha+tol)|x-y|.
  bool premise_holds = false;
  /// Every pair satisfies the same bound.
  bool holds = false;
  /// Sum over consecutive grid steps of max(0, ||df|| - (alpha+tol) dx).
  double chain_slack = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  double worst_ratio = 0.0;
};

/// Grid sample of [0,1] (strictly increasing xs, max gap < r0) with rows of
/// `f` as values. Ties in the worst ratio (relative 1e-12) keep the first pair.
GlobalLipschitzReport global_lipschitz_upgrade_check(const std::vector<double>& xs,
                                                     const Eigen::MatrixXd& f, double alpha,
                                                     double r0, double tol = 1e-9);

struct AnchorAudit {
  PointId anchor = 0;
  int first_round = 0;
  double delta = 0.0;
  /// 2^{-K}: K least with K >= first_round and 2^{-K} < delta.
  double threshold = 0.0;
  bool resolved = false;
  double estimate = 0.0;
  bool ok = false;
};

struct SelectionAudit {
  double beta = 0.0;
  double covering_radius = 0.0;
  double covering_bound = 0.0;  // 2^{-(N-1)}
  std::vector<AnchorAudit> anchors;
  std::size_t unresolved() const;
  bool all_ok() const;
};

/// Pointwise-Lipschitz audit of f_N at every point of B_N, using radii
/// 0.75 * 2^{-(K+j)} below each anchor's threshold. Anchors whose balls at
/// those radii contain no second sample point are reported unresolved (their
/// ratios are all zero).
SelectionAudit audit_limit_selection(const SelectionSequence& seq,
                                     const SampledMetricSpace& space, double tol = 1e-6,
                                     int k = 3, int levels = 12);

/// Radii 0.75 * 2^{-(K+j)} used by the audit for one anchor.
std::vector<double> threshold_radii(double threshold, int levels);
double anchor_threshold(int first_round, double delta);

}  // namespace lipselect

#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lipselect/correspondence.hpp"
#include "lipselect/metric_space.hpp"

namespace lipselect {

/// A single-valued map on the sample: row a holds f(a).
struct Selection {
  Eigen::MatrixXd values;
  int round = 0;

  Eigen::VectorXd at(PointId a) const { return values.row(static_cast<Eigen::Index>(a)).transpose(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

/// Evidence kept for one round of the construction.
struct RoundRecord {
  int n = 0;
  PointSet members;     // B_n
  PointSet new_points;  // B_n \ B_{n-1}
  std::map<PointId, double> deltas;
  std::map<PointId, Eigen::MatrixXd> local_selections;  // g_b, rows are points
  double sup_change = 0.0;
};

struct IterationConfig {
  double alpha = 0.0;
  double beta = 1.0;
  /// Defaults to (beta - alpha) / 3; may be smaller, never larger.
  std::optional<double> epsilon;
  int rounds = 1;
  double delta_min = 1e-9;
  double tol = 1e-9;
  double default_locality_radius = std::numeric_limits<double>::infinity();
  std::map<PointId, double> locality_radii;

  double effective_epsilon() const;
  double locality_radius(PointId b) const;
  /// Throws ParameterError naming the offending field.
  void validate() const;
};

struct SelectionSequence {
  IterationConfig config;
  double epsilon = 0.0;
  SeparationHierarchy hierarchy;
  std::vector<Selection> selections;  // f_0 .. f_N
  std::vector<RoundRecord> rounds;    // rounds[n-1] is round n

  int round_count() const noexcept { return static_cast<int>(rounds.size()); }
  const Selection& f(int n) const { return selections.at(static_cast<std::size_t>(n)); }
  const RoundRecord& record(int n) const { return rounds.at(static_cast<std::size_t>(n - 1)); }
};

/// Trapezoid bump: 1 on the closed delta-ball, 0 outside the open
/// 2*delta-ball, affine in distance between.
double bump_weight(double delta, double dist);
double bump_weight(const SampledMetricSpace& space, PointId b, double delta, PointId a);

/// Halving search for the support radius of anchor b in round n. Starts at
/// min(2^{-(n+1)}, r_b) / 2 and accepts the first delta with
/// max_{d(a,b) < 2 delta} ||f_prev(a) - g_b(a)|| <= 2^{-n} eps - 1e-12.
double compute_delta(const Eigen::MatrixXd& f_prev, const Eigen::MatrixXd& g_b, PointId b,
                     int n, double epsilon, double locality_radius,
                     const SampledMetricSpace& space, double delta_min, double tol = 1e-9);

/// f_n from f_{n-1}: convex blend toward g_b inside each support ball.
Selection blend_round(const Selection& f_prev, const RoundRecord& round,
                      const SampledMetricSpace& space);

SelectionSequence run_iteration(const Correspondence& phi, const Selection& f0,
                                const IterationConfig& config);

struct LimitSelection {
  Selection f;
  /// sup ||f - f_N|| <= 2^{-N} eps
  double tail_bound = 0.0;
};

LimitSelection limit_selection(const SelectionSequence& seq);

struct RoundReport {
  int n = 0;

  bool membership_ok = true;
  PointId membership_worst = 0;
  double membership_distance = 0.0;

  bool sup_ok = true;
  double sup_change = 0.0;  // recomputed from the tables
  double sup_bound = 0.0;   // 2^{-n} eps

  bool strong_ok = true;
  PointId strong_anchor = 0;
  PointId strong_point = 0;
  double strong_slack = std::numeric_limits<double>::infinity();

  struct CoincidenceFailure {
    PointId point;
    PointId anchor;
    int k;  // earliest function that differs: f_n != f_k
  };
  bool coincidence_ok = true;
  std::vector<CoincidenceFailure> coincidence_failures;

  bool all_ok() const noexcept {
    return membership_ok && sup_ok && strong_ok && coincidence_ok;
  }
};

/// Checks, for round n: selection membership at 1e-8, the 2^{-n} eps sup
/// bound (+1e-9), the strong alpha-bound on each new anchor's delta-ball
/// (+1e-9), and exact coincidence f_n = ... = f_k on B(b, 2^{-n}) for
/// b in B_k, k < n. Failures are reported, not thrown.
RoundReport verify_round_properties(const SelectionSequence& seq, const Correspondence& phi,
                                    int n);

}  // namespace lipselect

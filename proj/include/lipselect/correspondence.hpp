#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "lipselect/convex_body.hpp"
#include "lipselect/metric_space.hpp"

namespace lipselect {

/// A set-valued map over a sampled space, materialised as one convex body
/// per point. All bodies share one ambient dimension.
class Correspondence {
 public:
  Correspondence(SampledMetricSpace space, std::vector<ConvexBody> bodies);

  const SampledMetricSpace& space() const noexcept { return space_; }
  const ConvexBody& value(PointId a) const;
  const std::vector<ConvexBody>& values() const noexcept { return bodies_; }
  std::size_t ambient_dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return bodies_.size(); }

 private:
  SampledMetricSpace space_;
  std::vector<ConvexBody> bodies_;
  std::size_t dim_;
};

/// A full-row-rank real matrix T : R^n -> R^m with its SVD-derived data.
class LinearSurjection {
 public:
  static constexpr double kRankThreshold = 1e-12;

  explicit LinearSurjection(Eigen::MatrixXd matrix);

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  Eigen::Index codomain_dim() const noexcept { return matrix_.rows(); }
  Eigen::Index domain_dim() const noexcept { return matrix_.cols(); }
  double sigma_min() const noexcept { return sigma_min_; }
  double sigma_max() const noexcept { return sigma_max_; }

  /// T^+ y, the minimum-norm solution of T x = y.
  Eigen::VectorXd min_norm_solution(const Eigen::Ref<const Eigen::VectorXd>& y) const;
  /// Orthonormal basis of ker T (n x (n - m)).
  const Eigen::MatrixXd& kernel_basis() const noexcept { return kernel_; }

 private:
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd pseudo_inverse_;
  Eigen::MatrixXd kernel_;
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
};

/// y -> T^{-1}{y} over a sample of the codomain.
Correspondence inverse_image_correspondence(const LinearSurjection& t,
                                            const SampledMetricSpace& sample);

struct LowerPtlipCheck {
  bool holds = true;
  /// Point with the least slack alpha*d(b,a) + tol - dist(y, phi(a)).
  PointId witness = 0;
  double slack = 0.0;
};

/// dist(y, phi(a)) <= alpha * d(b, a) + tol for every sampled a.
LowerPtlipCheck check_lower_ptlip(const Correspondence& phi, PointId b,
                                  const Eigen::Ref<const Eigen::VectorXd>& y, double alpha,
                                  double tol);

/// g(a) := project(phi(a), y). Throws RateError if some sample violates
/// ||g(a) - y|| <= rate * d(b, a) + tol. Rows of the result are points.
Eigen::MatrixXd local_strong_selection(const Correspondence& phi, PointId b,
                                       const Eigen::Ref<const Eigen::VectorXd>& y, double rate,
                                       double tol = 1e-9);

}  // namespace lipselect

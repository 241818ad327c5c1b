#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace lipselect {

/// base + span(basis); basis columns are orthonormal. An empty basis is a
/// single point.
struct AffineFlat {
  Eigen::VectorXd base;
  Eigen::MatrixXd basis;  // d x k
};

struct Ball {
  Eigen::VectorXd center;
  double radius = 1.0;
};

/// normal · x <= offset
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;
};

/// Intersection of halfspaces, certified nonempty by `witness`.
struct Polytope {
  std::vector<Halfspace> halfspaces;
  Eigen::VectorXd witness;
};

struct DykstraOptions {
  double tolerance = 1e-10;
  int max_sweeps = 10000;
};

/// A closed convex subset of R^d. Immutable after construction; the
/// factories validate the representation invariants.
class ConvexBody {
 public:
  using Variant = std::variant<AffineFlat, Ball, Polytope>;

  /// Orthonormality of `basis` is checked to 1e-10.
  static ConvexBody flat(Eigen::VectorXd base, Eigen::MatrixXd basis);
  /// Orthonormalises arbitrary spanning directions first.
  static ConvexBody flat_from_directions(Eigen::VectorXd base,
                                         const Eigen::MatrixXd& directions);
  static ConvexBody point(Eigen::VectorXd p);
  static ConvexBody ball(Eigen::VectorXd center, double radius);
  /// `witness` must satisfy every halfspace to 1e-9.
  static ConvexBody polytope(std::vector<Halfspace> halfspaces, Eigen::VectorXd witness);
  /// Axis-aligned box [lo, hi] as a polytope.
  static ConvexBody box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

  std::size_t dimension() const noexcept { return dim_; }
  const Variant& variant() const noexcept { return body_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&body_);
  }

 private:
  ConvexBody(Variant body, std::size_t dim) : body_(std::move(body)), dim_(dim) {}

  Variant body_;
  std::size_t dim_;
};

/// Euclidean nearest point. Polytopes use Dykstra's alternating projection
/// over the halfspaces; throws ConvergenceError when the sweep budget runs out.
Eigen::VectorXd project(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& y,
                        const DykstraOptions& options = {});

double distance_to(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& y,
                   const DykstraOptions& options = {});

bool contains(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& x,
              double tol);

struct DykstraResult {
  Eigen::VectorXd point;
  int sweeps = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Raw Dykstra iteration, exposed for diagnostics; never throws on
/// non-convergence.
DykstraResult dykstra_projection(const std::vector<Halfspace>& halfspaces,
                                 const Eigen::Ref<const Eigen::VectorXd>& y,
                                 const DykstraOptions& options = {});

}  // namespace lipselect

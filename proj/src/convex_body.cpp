#include "lipselect/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lipselect/errors.hpp"

namespace lipselect {
namespace {

void check_dimension(const ConvexBody& body, Eigen::Index size) {
  if (static_cast<std::size_t>(size) != body.dimension()) {
    throw Error(ErrorKind::shape, "vector of dimension " + std::to_string(size) +
                                      " against body of dimension " +
                                      std::to_string(body.dimension()));
  }
}

}  // namespace

ConvexBody ConvexBody::flat(Eigen::VectorXd base, Eigen::MatrixXd basis) {
  if (basis.cols() > 0 && basis.rows() != base.size()) {
    throw Error(ErrorKind::shape, "flat basis rows must match base dimension");
  }
  if (basis.cols() == 0) basis.resize(base.size(), 0);
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(basis.cols(), basis.cols());
  if (basis.cols() > 0 && (gram - eye).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::configuration, "flat basis is not orthonormal");
  }
  const auto dim = static_cast<std::size_t>(base.size());
  return ConvexBody(AffineFlat{std::move(base), std::move(basis)}, dim);
}

ConvexBody ConvexBody::flat_from_directions(Eigen::VectorXd base,
                                            const Eigen::MatrixXd& directions) {
  if (directions.cols() == 0) return point(std::move(base));
  if (directions.rows() != base.size()) {
    throw Error(ErrorKind::shape, "flat directions must match base dimension");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(directions, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cutoff = 1e-12 * std::max(1.0, s(0));
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return flat(std::move(base), svd.matrixU().leftCols(rank));
}

ConvexBody ConvexBody::point(Eigen::VectorXd p) {
  const auto d = p.size();
  return flat(std::move(p), Eigen::MatrixXd(d, 0));
}

ConvexBody ConvexBody::ball(Eigen::VectorXd center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorKind::configuration, "ball radius must be positive");
  }
  const auto dim = static_cast<std::size_t>(center.size());
  return ConvexBody(Ball{std::move(center), radius}, dim);
}

ConvexBody ConvexBody::polytope(std::vector<Halfspace> halfspaces, Eigen::VectorXd witness) {
  for (const auto& h : halfspaces) {
    if (h.normal.size() != witness.size()) {
      throw Error(ErrorKind::shape, "halfspace normal dimension mismatch");
    }
    if (!(h.normal.norm() > 0.0)) {
      throw Error(ErrorKind::configuration, "halfspace normal must be nonzero");
    }
    if (h.normal.dot(witness) > h.offset + 1e-9) {
      throw Error(ErrorKind::configuration, "polytope witness violates a halfspace");
    }
  }
  const auto dim = static_cast<std::size_t>(witness.size());
  return ConvexBody(Polytope{std::move(halfspaces), std::move(witness)}, dim);
}

ConvexBody ConvexBody::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size()) throw Error(ErrorKind::shape, "box bounds differ in dimension");
  std::vector<Halfspace> hs;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (lo(i) > hi(i)) throw Error(ErrorKind::configuration, "box lower bound exceeds upper");
    Eigen::VectorXd e = Eigen::VectorXd::Unit(lo.size(), i);
    hs.push_back({e, hi(i)});
    hs.push_back({-e, -lo(i)});
  }
  return polytope(std::move(hs), 0.5 * (lo + hi));
}

DykstraResult dykstra_projection(const std::vector<Halfspace>& halfspaces,
                                 const Eigen::Ref<const Eigen::VectorXd>& y,
                                 const DykstraOptions& options) {
  DykstraResult result;
  result.point = y;
  if (halfspaces.empty()) {
    result.converged = true;
    return result;
  }
  const auto dim = y.size();
  std::vector<Eigen::VectorXd> increments(halfspaces.size(), Eigen::VectorXd::Zero(dim));
  std::vector<double> norms2;
  norms2.reserve(halfspaces.size());
  for (const auto& h : halfspaces) norms2.push_back(h.normal.squaredNorm());

  Eigen::VectorXd& x = result.point;
  Eigen::VectorXd z(dim);
  Eigen::VectorXd next(dim);
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    // Sum of squared increment changes; x = y - sum(increments) makes this
    // dominate the change in x as well.
    double change2 = 0.0;
    for (std::size_t i = 0; i < halfspaces.size(); ++i) {
      const auto& h = halfspaces[i];
      z = x + increments[i];
      const double excess = h.normal.dot(z) - h.offset;
      if (excess > 0.0) {
        next = z - (excess / norms2[i]) * h.normal;
      } else {
        next = z;
      }
      const Eigen::VectorXd increment = z - next;
      change2 += (increment - increments[i]).squaredNorm();
      increments[i] = increment;
      x = next;
    }
    result.sweeps = sweep;
    result.residual = std::sqrt(change2);
    if (result.residual <= options.tolerance) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

Eigen::VectorXd project(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& y,
                        const DykstraOptions& options) {
  check_dimension(body, y.size());
  if (const auto* f = body.as<AffineFlat>()) {
    const Eigen::VectorXd offset = y - f->base;
    return f->base + f->basis * (f->basis.transpose() * offset);
  }
  if (const auto* b = body.as<Ball>()) {
    const Eigen::VectorXd offset = y - b->center;
    const double norm = offset.norm();
    if (norm <= b->radius) return y;
    return b->center + (b->radius / norm) * offset;
  }
  const auto& p = *body.as<Polytope>();
  auto result = dykstra_projection(p.halfspaces, y, options);
  if (!result.converged) {
    throw ConvergenceError(result.residual,
                           "Dykstra projection did not converge in " +
                               std::to_string(options.max_sweeps) + " sweeps (residual " +
                               std::to_string(result.residual) + ")");
  }
  return std::move(result.point);
}

double distance_to(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& y,
                   const DykstraOptions& options) {
  check_dimension(body, y.size());
  if (const auto* f = body.as<AffineFlat>()) {
    const Eigen::VectorXd offset = y - f->base;
    return (offset - f->basis * (f->basis.transpose() * offset)).norm();
  }
  if (const auto* b = body.as<Ball>()) {
    return std::max(0.0, (y - b->center).norm() - b->radius);
  }
  return (y - project(body, y, options)).norm();
}

bool contains(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& x, double tol) {
  check_dimension(body, x.size());
  if (const auto* p = body.as<Polytope>()) {
    // Inside every halfspace means inside the body; skip the projection.
    const bool inside = std::all_of(p->halfspaces.begin(), p->halfspaces.end(),
                                    [&](const Halfspace& h) { return h.normal.dot(x) <= h.offset; });
    if (inside) return true;
  }
  return distance_to(body, x) <= tol;
}

}  // namespace lipselect

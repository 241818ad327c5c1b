#include "lipselect/correspondence.hpp"

#include <string>

#include "lipselect/errors.hpp"

namespace lipselect {

Correspondence::Correspondence(SampledMetricSpace space, std::vector<ConvexBody> bodies)
    : space_(std::move(space)), bodies_(std::move(bodies)), dim_(0) {
  if (bodies_.size() != space_.size()) {
    throw Error(ErrorKind::configuration,
                "correspondence needs one body per point (" + std::to_string(space_.size()) +
                    " points, " + std::to_string(bodies_.size()) + " bodies)");
  }
  if (bodies_.empty()) throw Error(ErrorKind::configuration, "empty correspondence");
  dim_ = bodies_.front().dimension();
  for (const auto& body : bodies_) {
    if (body.dimension() != dim_) {
      throw Error(ErrorKind::shape, "correspondence bodies differ in ambient dimension");
    }
  }
}

const ConvexBody& Correspondence::value(PointId a) const {
  space_.check_id(a);
  return bodies_[a];
}

LinearSurjection::LinearSurjection(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  const auto m = matrix_.rows();
  const auto n = matrix_.cols();
  if (m < 1 || n < m) {
    throw Error(ErrorKind::shape, "a surjection needs 1 <= rows <= columns");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  sigma_max_ = s(0);
  sigma_min_ = s(m - 1);
  if (!(sigma_min_ > kRankThreshold)) {
    throw Error(ErrorKind::rank_deficiency,
                "matrix is not full row rank (sigma_min = " + std::to_string(sigma_min_) + ")");
  }
  const Eigen::MatrixXd& u = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  pseudo_inverse_ = v.leftCols(m) * s.head(m).cwiseInverse().asDiagonal() * u.transpose();
  kernel_ = v.rightCols(n - m);
}

Eigen::VectorXd LinearSurjection::min_norm_solution(
    const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (y.size() != codomain_dim()) {
    throw Error(ErrorKind::shape, "right-hand side does not match codomain dimension");
  }
  return pseudo_inverse_ * y;
}

Correspondence inverse_image_correspondence(const LinearSurjection& t,
                                            const SampledMetricSpace& sample) {
  if (sample.dimension() != static_cast<std::size_t>(t.codomain_dim())) {
    throw Error(ErrorKind::shape, "sample points must live in the codomain of T");
  }
  std::vector<ConvexBody> bodies;
  bodies.reserve(sample.size());
  for (PointId a = 0; a < sample.size(); ++a) {
    bodies.push_back(ConvexBody::flat(t.min_norm_solution(sample.point(a)), t.kernel_basis()));
  }
  return Correspondence(sample, std::move(bodies));
}

LowerPtlipCheck check_lower_ptlip(const Correspondence& phi, PointId b,
                                  const Eigen::Ref<const Eigen::VectorXd>& y, double alpha,
                                  double tol) {
  if (!contains(phi.value(b), y, tol)) {
    throw Error(ErrorKind::precondition, "anchor value is not in phi(b)");
  }
  LowerPtlipCheck out;
  bool first = true;
  for (PointId a = 0; a < phi.size(); ++a) {
    const double slack =
        alpha * distance(phi.space(), b, a) + tol - distance_to(phi.value(a), y);
    if (first || slack < out.slack) {
      out.slack = slack;
      out.witness = a;
      first = false;
    }
  }
  out.holds = out.slack >= 0.0;
  return out;
}

Eigen::MatrixXd local_strong_selection(const Correspondence& phi, PointId b,
                                       const Eigen::Ref<const Eigen::VectorXd>& y, double rate,
                                       double tol) {
  if (!contains(phi.value(b), y, tol)) {
    throw Error(ErrorKind::precondition, "anchor value is not in phi(b)");
  }
  const auto n = static_cast<Eigen::Index>(phi.size());
  Eigen::MatrixXd g(n, static_cast<Eigen::Index>(phi.ambient_dim()));
  for (PointId a = 0; a < phi.size(); ++a) {
    const Eigen::VectorXd ga = project(phi.value(a), y);
    const double slack = rate * distance(phi.space(), b, a) + tol - (ga - y).norm();
    if (slack < 0.0) {
      throw RateError(a, slack,
                      "strong pointwise bound fails at point " + std::to_string(a) +
                          " for anchor " + std::to_string(b));
    }
    g.row(static_cast<Eigen::Index>(a)) = ga.transpose();
  }
  return g;
}

}  // namespace lipselect

#include "lipselect/bartle_graves.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "lipselect/errors.hpp"

namespace lipselect {

double openness_constant(const LinearSurjection& t) { return t.sigma_min(); }

SampledMetricSpace sphere_sample(int m, int count, std::uint64_t seed) {
  if (m < 1) throw ParameterError("m", "sphere dimension must be at least 1");
  if (count < 2) throw ParameterError("count", "sphere sample needs at least 2 points");
  if (m == 1) {
    Eigen::MatrixXd coords(2, 1);
    coords << -1.0, 1.0;
    return SampledMetricSpace(MetricKind::l2, std::move(coords));
  }
  Eigen::MatrixXd coords(count, m);
  if (m == 2) {
    for (int k = 0; k < count; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / count;
      coords(k, 0) = std::cos(angle);
      coords(k, 1) = std::sin(angle);
    }
    return SampledMetricSpace(MetricKind::l2, std::move(coords));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int filled = 0;
  while (filled < count) {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = gauss(rng);
    const double norm = v.norm();
    if (!(norm > 1e-12)) continue;
    v /= norm;
    bool fresh = true;
    for (int j = 0; j < filled && fresh; ++j) {
      fresh = (coords.row(j).transpose() - v).norm() > 1e-6;
    }
    if (!fresh) continue;
    coords.row(filled++) = v.transpose();
  }
  return SampledMetricSpace(MetricKind::l2, std::move(coords));
}

RightInverse build_right_inverse(const LinearSurjection& t, double beta,
                                 const SphereConfig& sphere, IterationConfig iteration) {
  const double gamma = openness_constant(t);
  const double alpha = 1.0 / gamma;
  if (!(beta > alpha)) {
    throw ParameterError("beta", "beta must exceed 1/gamma = " + std::to_string(alpha));
  }
  iteration.alpha = alpha;
  iteration.beta = beta;

  SampledMetricSpace sample =
      sphere_sample(static_cast<int>(t.codomain_dim()), sphere.count, sphere.seed);
  Correspondence phi = inverse_image_correspondence(t, sample);

  Selection f0{Eigen::MatrixXd(static_cast<Eigen::Index>(sample.size()), t.domain_dim()), 0};
  for (PointId a = 0; a < sample.size(); ++a) {
    f0.values.row(static_cast<Eigen::Index>(a)) = t.min_norm_solution(sample.point(a)).transpose();
  }

  SelectionSequence seq = run_iteration(phi, f0, iteration);
  LimitSelection limit = limit_selection(seq);
  SphereTable table(sample, limit.f.values);
  const double eta = 2.0 * beta + table.sup_norm();
  PointSet dense = seq.hierarchy.round(seq.round_count()).members;

  return RightInverse{t,     std::move(phi), std::move(seq), std::move(table), gamma,
                      alpha, beta,           eta,            limit.tail_bound, std::move(dense)};
}

Eigen::VectorXd evaluate_right_inverse(const RightInverse& ri,
                                       const Eigen::Ref<const Eigen::VectorXd>& y) {
  return homogeneous_extension(ri.sphere, y);
}

namespace {

double relative_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  const double scale = want.lpNorm<Eigen::Infinity>();
  const double err = (got - want).lpNorm<Eigen::Infinity>();
  return scale > 0.0 ? err / scale : err;
}

}  // namespace

RightInverseReport verify_right_inverse(const RightInverse& ri, const VerifyOptions& options) {
  RightInverseReport report;
  const auto& dirs = ri.sphere.directions();
  const Eigen::MatrixXd& tm = ri.t.matrix();
  // Rounding allowance for "exact" homogeneity: a few ulps of the result.
  constexpr double kHomogeneityTol = 4.0 * std::numeric_limits<double>::epsilon();

  // (i) identity on sampled rays and (ii) homogeneity there.
  for (PointId u = 0; u < dirs.size(); ++u) {
    const Eigen::VectorXd dir = dirs.point(u);
    const Eigen::VectorXd base = evaluate_right_inverse(ri, dir);
    for (double lambda : options.scales) {
      const Eigen::VectorXd y = lambda * dir;
      const Eigen::VectorXd x = evaluate_right_inverse(ri, y);
      const double residual = (tm * x - y).norm();
      if (residual > report.identity_residual) {
        report.identity_residual = residual;
        report.identity_worst_direction = u;
        report.identity_worst_scale = lambda;
      }
      report.homogeneity_error =
          std::max(report.homogeneity_error, relative_error(x, Eigen::VectorXd(lambda * base)));
    }
    report.pseudo_inverse_gap = std::max(
        report.pseudo_inverse_gap,
        (ri.sphere.values().row(static_cast<Eigen::Index>(u)).transpose() - ri.t.min_norm_solution(dir))
            .norm());
  }
  report.identity_ok = report.identity_residual <= options.identity_tol;

  // Off-sample rays: T tau(y) equals ||y|| times the nearest sampled direction.
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(ri.sphere.ambient_dim());
  for (int i = 0; i < options.off_sample_directions; ++i) {
    Eigen::VectorXd v(m);
    for (Eigen::Index j = 0; j < m; ++j) v(j) = gauss(rng);
    if (!(v.norm() > 1e-12)) continue;
    v.normalize();
    const Eigen::VectorXd base = evaluate_right_inverse(ri, v);
    for (double lambda : options.scales) {
      const Eigen::VectorXd y = lambda * v;
      const Eigen::VectorXd x = evaluate_right_inverse(ri, y);
      const Eigen::VectorXd nearest = dirs.point(ri.sphere.nearest_direction(y / y.norm()));
      report.off_sample_residual =
          std::max(report.off_sample_residual, (tm * x - y.norm() * nearest).norm());
      report.off_sample_identity_residual =
          std::max(report.off_sample_identity_residual, (tm * x - y).norm());
      report.homogeneity_error =
          std::max(report.homogeneity_error, relative_error(x, Eigen::VectorXd(lambda * base)));
    }
  }
  report.off_sample_ok = report.off_sample_residual <= options.identity_tol;
  report.homogeneity_ok = report.homogeneity_error <= kHomogeneityTol;

  // (iii) sphere-side audit, then the extension on dense-set rays.
  report.sphere_audit = audit_limit_selection(ri.sequence, dirs, options.plip_tol);
  std::vector<Ray> rays;
  for (const auto& anchor : report.sphere_audit.anchors) {
    for (double lambda : options.scales) {
      Ray ray;
      ray.direction = anchor.anchor;
      ray.scale = lambda;
      for (double r : threshold_radii(anchor.threshold, options.radius_levels)) {
        ray.radii.push_back(0.5 * lambda * r);
      }
      rays.push_back(std::move(ray));
    }
  }
  report.plip = verify_homogeneous_plip(ri.sphere, ri.beta, rays, options.plip_tol);
  report.plip_ok = report.plip.all_ok() && report.sphere_audit.all_ok();

  // (iv)
  report.covering_radius = report.sphere_audit.covering_radius;
  report.covering_bound = report.sphere_audit.covering_bound;
  report.covering_ok = report.covering_radius < report.covering_bound;
  return report;
}

}  // namespace lipselect

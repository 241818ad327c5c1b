#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lipselect/correspondence.hpp"
#include "lipselect/lipschitz.hpp"
#include "lipselect/selection.hpp"

namespace lipselect {

/// Largest gamma with gamma * B_Y ⊆ T(B_X) for Euclidean norms, i.e. the
/// smallest singular value of T.
double openness_constant(const LinearSurjection& t);

/// Unit-sphere sample of R^m: {-1, +1} for m = 1, a uniform angular grid for
/// m = 2 and seeded normalised Gaussian draws (deduplicated at 1e-6) for
/// m >= 3. Euclidean chord metric.
SampledMetricSpace sphere_sample(int m, int count, std::uint64_t seed);

struct SphereConfig {
  int count = 64;
  std::uint64_t seed = 0;
};

/// A positively homogeneous right inverse assembled from a selection of the
/// inverse-image correspondence on the unit sphere.
struct RightInverse {
  LinearSurjection t;
  Correspondence phi;
  SelectionSequence sequence;
  SphereTable sphere;  // the sphere values of the right inverse
  double gamma = 0.0;
  double alpha = 0.0;  // 1 / gamma
  double beta = 0.0;
  double eta = 0.0;    // 2 beta + sup norm of the sphere values
  double tail_bound = 0.0;
  PointSet dense_set;  // B_N; its rays {lambda b : lambda > 0} form B'
};

/// Runs the selection iteration with alpha := 1/gamma and f_0 := T^+ on the
/// sphere sample. `iteration.alpha` and `iteration.beta` are overwritten.
/// Throws ParameterError("beta") unless beta > 1/gamma.
RightInverse build_right_inverse(const LinearSurjection& t, double beta,
                                 const SphereConfig& sphere, IterationConfig iteration);

Eigen::VectorXd evaluate_right_inverse(const RightInverse& ri,
                                       const Eigen::Ref<const Eigen::VectorXd>& y);

struct VerifyOptions {
  std::vector<double> scales{0.5, 1.0, 2.0, 10.0};
  int off_sample_directions = 16;
  std::uint64_t seed = 1;
  double identity_tol = 1e-8;
  double plip_tol = 1e-6;
  int radius_levels = 8;
};

struct RightInverseReport {
  // (i) T tau(y) = y on sampled rays
  bool identity_ok = false;
  double identity_residual = 0.0;
  PointId identity_worst_direction = 0;
  double identity_worst_scale = 0.0;
  // off-sample rays, checked against nearest-direction semantics
  bool off_sample_ok = false;
  double off_sample_residual = 0.0;
  /// ||T tau(y) - y|| off the sample; informational only.
  double off_sample_identity_residual = 0.0;
  // (ii) tau(lambda y) = lambda tau(y), relative to ||lambda tau(y)||
  bool homogeneity_ok = false;
  double homogeneity_error = 0.0;
  // (iii) plip on dense-set rays
  bool plip_ok = false;
  HomogeneousPlipReport plip;
  SelectionAudit sphere_audit;
  // (iv) density of B_N on the sphere
  bool covering_ok = false;
  double covering_radius = 0.0;
  double covering_bound = 0.0;
  /// sup over the sphere sample of ||tau(y) - T^+ y||
  double pseudo_inverse_gap = 0.0;

  bool all_ok() const noexcept {
    return identity_ok && off_sample_ok && homogeneity_ok && plip_ok && covering_ok;
  }
};

RightInverseReport verify_right_inverse(const RightInverse& ri, const VerifyOptions& options = {});

}  // namespace lipselect

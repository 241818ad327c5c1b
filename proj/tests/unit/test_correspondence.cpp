#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "lipselect/correspondence.hpp"
#include "lipselect/errors.hpp"

using namespace lipselect;

namespace {

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

LinearSurjection ones() { return LinearSurjection(Eigen::MatrixXd::Ones(1, 2)); }

}  // namespace

TEST_SUITE("correspondence") {
  TEST_CASE("inverse image flats") {
    const auto phi = inverse_image_correspondence(ones(), SampledMetricSpace::on_line({0.0, 1.0}));
    const auto* f1 = phi.value(1).as<AffineFlat>();
    REQUIRE(f1 != nullptr);
    CHECK((f1->base - v2(0.5, 0.5)).norm() < 1e-15);
    REQUIRE(f1->basis.cols() == 1);
    CHECK(std::abs(f1->basis.col(0).dot(v2(1, -1)) / std::sqrt(2.0)) == doctest::Approx(1.0));
    const auto* f0 = phi.value(0).as<AffineFlat>();
    CHECK(f0->base.norm() < 1e-15);

    Eigen::MatrixXd y(1, 2);
    y << 0.0, 1.0;
    const auto id = inverse_image_correspondence(LinearSurjection(Eigen::MatrixXd::Identity(2, 2)),
                                                 SampledMetricSpace(MetricKind::l2, y));
    CHECK(id.value(0).as<AffineFlat>()->basis.cols() == 0);
    CHECK((id.value(0).as<AffineFlat>()->base - v2(0, 1)).norm() < 1e-15);
  }

  TEST_CASE("rank deficiency and shape") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 2, 4;
    try {
      LinearSurjection t(bad);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::rank_deficiency);
    }
    CHECK_THROWS_AS(LinearSurjection(Eigen::MatrixXd::Ones(3, 2)), Error);
  }

  TEST_CASE("singular values agree with the closed form") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd m(2, 4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = g(rng);
      const LinearSurjection t(m);
      CHECK(t.sigma_min() == doctest::Approx(oracle::sigma_min_closed_form(m)).epsilon(1e-12));
      const Eigen::VectorXd y = v2(g(rng), g(rng));
      const Eigen::VectorXd x = t.min_norm_solution(y);
      CHECK((m * x - y).norm() < 1e-12);
      CHECK((m * t.kernel_basis()).norm() < 1e-12);
      // Minimum norm: orthogonal to the kernel.
      CHECK((t.kernel_basis().transpose() * x).norm() < 1e-12);
    }
  }

  TEST_CASE("lower pointwise Lipschitz check") {
    const auto phi = inverse_image_correspondence(ones(), SampledMetricSpace::on_line({-1.0, 1.0}));
    const auto good = check_lower_ptlip(phi, 1, v2(0.5, 0.5), 1.0 / std::sqrt(2.0), 1e-12);
    CHECK(good.holds);
    const auto bad = check_lower_ptlip(phi, 1, v2(0.5, 0.5), 0.5, 1e-12);
    CHECK_FALSE(bad.holds);
    CHECK(bad.witness == 0);
    CHECK(bad.slack == doctest::Approx(1.0 - std::sqrt(2.0)));
    CHECK_THROWS_AS(check_lower_ptlip(phi, 1, v2(0, 0), 1.0, 1e-12), Error);

    const auto line = SampledMetricSpace::on_line({0.0, 0.5, 2.0});
    std::vector<ConvexBody> same(3, ConvexBody::ball(v2(1, 1), 0.5));
    const Correspondence constant(line, same);
    CHECK(check_lower_ptlip(constant, 2, v2(1.2, 1.1), 0.0, 0.0).holds);
  }

  TEST_CASE("sharpness of the lower rate for inverse images") {
    std::vector<double> ys;
    for (int i = 0; i <= 20; ++i) ys.push_back(-1.0 + 0.1 * i);
    Eigen::MatrixXd m(1, 3);
    m << 2.0, -1.0, 0.5;
    const LinearSurjection t(m);
    const auto phi = inverse_image_correspondence(t, SampledMetricSpace::on_line(ys));
    const double alpha = 1.0 / t.sigma_min();
    for (PointId b = 0; b < ys.size(); ++b) {
      const Eigen::VectorXd y = t.min_norm_solution(Eigen::VectorXd::Constant(1, ys[b]));
      CHECK(check_lower_ptlip(phi, b, y, alpha + 1e-6, 1e-12).holds);
      CHECK_FALSE(check_lower_ptlip(phi, b, y, alpha - 1e-3, 1e-12).holds);
    }
  }

  TEST_CASE("local strong selections") {
    const auto phi =
        inverse_image_correspondence(ones(), SampledMetricSpace::on_line({-1.0, 0.0, 1.0}));
    const Eigen::MatrixXd g = local_strong_selection(phi, 2, v2(0.5, 0.5), 1.0 / std::sqrt(2.0));
    CHECK((g.row(1).transpose() - v2(0, 0)).norm() < 1e-15);
    CHECK((g.row(0).transpose() - v2(-0.5, -0.5)).norm() < 1e-15);
    CHECK((g.row(2).transpose() - v2(0.5, 0.5)).norm() <= 1e-12);
    CHECK_THROWS_AS(local_strong_selection(phi, 2, v2(0.5, 0.5), 0.5), RateError);

    std::vector<double> xs;
    std::vector<ConvexBody> bodies;
    for (int i = -4; i <= 4; ++i) {
      xs.push_back(0.5 * i);
      bodies.push_back(ConvexBody::ball(v2(0.5 * i, 0.0), 1.0));
    }
    const Correspondence moving(SampledMetricSpace::on_line(xs), bodies);
    const Eigen::MatrixXd h = local_strong_selection(moving, 4, v2(0, 0), 1.0);
    for (Eigen::Index a = 0; a < h.rows(); ++a) {
      CHECK(contains(moving.value(static_cast<PointId>(a)), h.row(a).transpose(), 1e-8));
      if (std::abs(xs[static_cast<std::size_t>(a)]) <= 1.0) CHECK(h.row(a).norm() == 0.0);
      CHECK(h.row(a).norm() <= std::abs(xs[static_cast<std::size_t>(a)]) + 1e-9);
    }
  }

  TEST_CASE("correspondence shape checks") {
    const auto line = SampledMetricSpace::on_line({0.0, 1.0});
    CHECK_THROWS_AS(Correspondence(line, {ConvexBody::ball(v2(0, 0), 1.0)}), Error);
    Eigen::VectorXd c3 = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(Correspondence(line, {ConvexBody::ball(v2(0, 0), 1.0), ConvexBody::ball(c3, 1.0)}),
                    Error);
  }
}

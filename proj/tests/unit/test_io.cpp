#include <doctest.h>

#include "lipselect/errors.hpp"
#include "lipselect/io.hpp"

using namespace lipselect;
using io::json;

namespace {

std::string schema_message(const json& j, ConvexBody (*parse)(const json&)) {
  try {
    parse(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::schema);
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("space documents") {
    const auto s = io::space_from_json({{"metric", "l1"}, {"points", {{0, 0}, {3, 4}}}});
    CHECK(distance(s, 0, 1) == 7.0);
    const auto line = io::space_from_json({{"metric", "l2"}, {"points", {0.0, 0.5}}});
    CHECK(line.dimension() == 1);
    const auto back = io::space_from_json(io::to_json(s));
    CHECK(back.coords() == s.coords());
    CHECK(back.kind() == MetricKind::l1);

    const auto ex = io::space_from_json({{"metric", "explicit"}, {"distances", {{0, 1}, {1, 0}}}});
    CHECK(distance(ex, 0, 1) == 1.0);
    CHECK_THROWS_AS(io::space_from_json({{"metric", "explicit"},
                                         {"distances", {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}}}),
                    Error);
    CHECK_THROWS_AS(io::space_from_json({{"metric", "l7"}, {"points", {0.0}}}), Error);
  }

  TEST_CASE("body documents round-trip") {
    const json flat{{"kind", "flat"}, {"base", {0.5, 0.5}}, {"basis", {{std::sqrt(0.5), -std::sqrt(0.5)}}}};
    const json ball{{"kind", "ball"}, {"center", {1.0, 2.0}}, {"radius", 0.5}};
    const json poly{{"kind", "polytope"},
                    {"halfspaces", {{{"normal", {1.0, 0.0}}, {"offset", 1.0}},
                                    {{"normal", {0.0, 1.0}}, {"offset", 1.0}}}},
                    {"witness", {0.0, 0.0}}};
    for (const auto& j : {flat, ball, poly}) {
      const auto body = io::body_from_json(j);
      CHECK(io::to_json(io::body_from_json(io::to_json(body))) == io::to_json(body));
    }
    CHECK(io::body_from_json(flat).as<AffineFlat>()->basis.cols() == 1);
  }

  TEST_CASE("schema errors carry a location") {
    const std::string msg = schema_message({{"kind", "ball"}, {"center", {1.0, "x"}}, {"radius", 1.0}},
                                           &io::body_from_json);
    CHECK(msg.rfind("/center/1", 0) == 0);
    CHECK(schema_message({{"kind", "cone"}}, &io::body_from_json).rfind("/kind", 0) == 0);
  }

  TEST_CASE("correspondence accepts objects keyed by id") {
    const json space{{"metric", "l2"}, {"points", {0.0, 1.0}}};
    const json b{{"kind", "ball"}, {"center", {0.0}}, {"radius", 1.0}};
    const auto phi = io::correspondence_from_json({{"space", space}, {"bodies", {{"1", b}, {"0", b}}}});
    CHECK(phi.size() == 2);
    CHECK_THROWS_AS(io::correspondence_from_json({{"space", space}, {"bodies", {{"0", b}}}}), Error);
  }

  TEST_CASE("iteration config and sequence round-trip") {
    const auto c = io::iteration_config_from_json(
        {{"alpha", 0.5}, {"beta", 1.0}, {"rounds", 3}, {"r_b", {{"2", 0.1}}}});
    CHECK(c.locality_radius(2) == 0.1);
    CHECK(std::isinf(c.locality_radius(0)));
    CHECK(io::iteration_config_from_json(io::to_json(c)).locality_radius(2) == 0.1);

    const auto space = SampledMetricSpace::on_line({0.0, 0.3, 1.0});
    const Correspondence phi(space, std::vector<ConvexBody>(3, ConvexBody::ball(Eigen::VectorXd::Zero(1), 1.0)));
    Selection f0{Eigen::MatrixXd::Zero(3, 1), 0};
    f0.values(1, 0) = 0.4;
    IterationConfig cfg;
    cfg.alpha = 0.0;
    cfg.beta = 1.0;
    cfg.rounds = 3;
    const auto seq = run_iteration(phi, f0, cfg);
    const auto back = io::sequence_from_json(io::to_json(seq));
    CHECK(back.round_count() == 3);
    CHECK(back.epsilon == seq.epsilon);
    for (int n = 0; n <= 3; ++n) CHECK(back.f(n).values == seq.f(n).values);
    for (int n = 1; n <= 3; ++n) {
      CHECK(back.record(n).deltas == seq.record(n).deltas);
      CHECK(back.hierarchy.round(n).members == seq.hierarchy.round(n).members);
    }
    CHECK(io::dump(io::to_json(back)) == io::dump(io::to_json(seq)));
  }

  TEST_CASE("number formatting") {
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::dump(json{{"x", 0.5}, {"n", 3}, {"s", "a"}}) == "{\n  \"n\": 3,\n  \"s\": \"a\",\n  \"x\": 0.5\n}\n");
    Eigen::MatrixXd t(2, 2);
    t << 1.0, 0.25, -2.0, 1e-300;
    CHECK(io::table_to_csv(t) == "point_id,x1,x2\n0,1,0.25\n1,-2,1e-300\n");
  }
}

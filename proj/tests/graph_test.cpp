#include <doctest.h>

#include "hsigma/errors.hpp"
#include "hsigma/graph.hpp"
#include "hsigma/verify.hpp"

using namespace hsigma;

TEST_SUITE("graph") {
  TEST_CASE("bundled fixtures load with the pinned vertex last") {
    const Graph tri = load_graph(fixture_path("triangle.json"));
    CHECK(tri.n() == 2);
    CHECK(tri.size() == 3);
    CHECK(tri.pinned() == "delta");
    CHECK(tri.label(tri.pinned_index()) == "delta");
    CHECK(tri.w(tri.index("1"), tri.index("2")) == 1.0);
    CHECK(tri.w(tri.index("2"), tri.pinned_index()) == 1.2);
    CHECK(tri.edges().size() == 3);
  }

  TEST_CASE("weights are symmetric with an empty diagonal") {
    const Graph g = load_graph(fixture_path("star.json"));
    CHECK(g.weights().isApprox(g.weights().transpose()));
    CHECK(g.weights().diagonal().isZero());
  }

  TEST_CASE("invalid fixtures throw FixtureError") {
    CHECK_THROWS_AS(parse_graph("{not json"), FixtureError);
    CHECK_THROWS_AS(parse_graph(R"({"vertices": ["1"]})"), FixtureError);
    CHECK_THROWS_AS(parse_graph(R"({"vertices": ["1"], "edges": [{"i": "1", "j": "x", "w": 1}]})"), FixtureError);
    CHECK_THROWS_AS(parse_graph(R"({"vertices": ["1"], "edges": [{"i": "1", "j": "1", "w": 1}]})"), FixtureError);
    CHECK_THROWS_AS(parse_graph(R"({"vertices": ["1"], "edges": [{"i": "1", "j": "delta", "w": -1}]})"),
                    FixtureError);
    CHECK_THROWS_AS(parse_graph(R"({"vertices": ["1", "2"], "edges": [{"i": "1", "j": "delta", "w": 1}]})"),
                    FixtureError);
    CHECK_THROWS_AS(parse_graph(R"({"vertices": ["1"], "edges": [{"i": "1", "j": "delta", "w": 1},
                                                                 {"i": "delta", "j": "1", "w": 2}]})"),
                    FixtureError);
    CHECK_THROWS_AS(load_graph("/nonexistent/graph.json"), FixtureError);
  }

  TEST_CASE("JSON round trip preserves the graph") {
    const Graph g = load_graph(fixture_path("triangle.json"));
    const Graph h = parse_graph(graph_to_json(g));
    CHECK(h.labels() == g.labels());
    CHECK(h.weights().isApprox(g.weights()));
  }

  TEST_CASE("wired subgraph of the line tower collects the outside mass") {
    const GraphTower t = load_tower(fixture_path("line_tower.json"));
    REQUIRE(t.n_levels() == 3);
    const Graph g0 = wired_subgraph(t, 0);
    CHECK(g0.n() == 1);
    CHECK(g0.w(0, g0.pinned_index()) == 1.0);
    const Graph g2 = wired_subgraph(t, 2);
    CHECK(g2.n() == 3);
    CHECK(g2.w(g2.index("1"), g2.pinned_index()) == 0.0);
    CHECK(g2.w(g2.index("3"), g2.pinned_index()) == 1.0);
    CHECK(g2.w(g2.index("1"), g2.index("2")) == 1.0);
  }

  TEST_CASE("wired subgraph of the Z line has one boundary edge on each side") {
    const GraphTower t = load_tower(fixture_path("zline_tower.json"));
    const Graph g1 = wired_subgraph(t, 1);
    CHECK(g1.n() == 3);
    CHECK(g1.w(g1.index("-1"), g1.pinned_index()) == 1.0);
    CHECK(g1.w(g1.index("1"), g1.pinned_index()) == 1.0);
    CHECK(g1.w(g1.index("0"), g1.pinned_index()) == 0.0);
  }

  TEST_CASE("wired star collects every leaf weight at the centre") {
    const GraphTower t = parse_tower(R"({"vertices": ["c", "x", "y", "z"],
      "edges": [{"i": "c", "j": "x", "w": 0.5}, {"i": "c", "j": "y", "w": 1.5}, {"i": "c", "j": "z", "w": 2.0}],
      "levels": [["c"], ["c", "x"]]})");
    const Graph g = wired_subgraph(t, 0);
    CHECK(g.w(0, g.pinned_index()) == doctest::Approx(4.0));
  }

  TEST_CASE("a level covering the whole universe leaves the boundary isolated") {
    const GraphTower t = parse_tower(R"({"vertices": ["1", "2"], "edges": [{"i": "1", "j": "2", "w": 1}],
      "levels": [["1"], ["1", "2"]]})");
    CHECK_NOTHROW(wired_subgraph(t, 0));
    CHECK_THROWS_AS(wired_subgraph(t, 1), InvariantViolation);
  }

  TEST_CASE("extend_alpha moves outside mass to the boundary") {
    const GraphTower t = load_tower(fixture_path("line_tower.json"));
    const Eigen::VectorXd a0 = extend_alpha(t, {}, 1);
    CHECK(a0.isZero());
    const Eigen::VectorXd a1 = extend_alpha(t, {{"4", -1.0}, {"1", -0.5}}, 1);
    CHECK(a1(0) == -0.5);
    CHECK(a1(2) == -1.0);
    CHECK_THROWS_AS(extend_alpha(t, {{"1", 0.5}}, 1), DomainError);
  }
}

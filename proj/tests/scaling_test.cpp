#include <doctest.h>

#include <cmath>

#include "hsigma/errors.hpp"
#include "hsigma/graph.hpp"
#include "hsigma/rng.hpp"
#include "hsigma/scaling.hpp"
#include "hsigma/sigma_core.hpp"
#include "hsigma/verify.hpp"

using namespace hsigma;

namespace {

ScaleParams random_params(Philox& rng, std::size_t n) {
  Eigen::VectorXd a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(static_cast<Eigen::Index>(i)) = 0.5 + 1.5 * rng.uniform();
    b(static_cast<Eigen::Index>(i)) = 2.0 * rng.uniform() - 1.0;
  }
  return ScaleParams::from_free(a, b);
}

FieldConfig random_config(Philox& rng, std::size_t n) {
  Eigen::VectorXd u(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    u(static_cast<Eigen::Index>(i)) = 3.0 * rng.uniform() - 1.5;
    s(static_cast<Eigen::Index>(i)) = 3.0 * rng.uniform() - 1.5;
  }
  return FieldConfig::from_free(u, s);
}

}  // namespace

TEST_SUITE("scaling") {
  TEST_CASE("edge closed form at a = 1.2, b = 0.3") {
    const Graph g = load_graph(fixture_path("edge.json"));
    const ScaleParams p = ScaleParams::from_free(Eigen::VectorXd::Constant(1, 1.2), Eigen::VectorXd::Constant(1, 0.3));
    // Only the edge to the pinned vertex contributes: exp(-(1.2 - 1)) / 1.2.
    CHECK(laplace_closed_form(g, p) == doctest::Approx(std::exp(-0.2) / 1.2).epsilon(1e-15));
    CHECK(laplace_closed_form(g, p) == doctest::Approx(0.68228).epsilon(1e-5));
  }

  TEST_CASE("closed form is 1 at the identity") {
    for (const char* f : {"edge.json", "triangle.json", "star.json", "path.json"}) {
      const Graph g = load_graph(fixture_path(f));
      CHECK(laplace_closed_form(g, ScaleParams::identity(g)) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("scale_fields is a group action and inverse undoes it") {
    Philox rng(1, 0);
    const Graph g = load_graph(fixture_path("triangle.json"));
    for (int t = 0; t < 20; ++t) {
      const ScaleParams p = random_params(rng, g.n()), q = random_params(rng, g.n());
      const FieldConfig c = random_config(rng, g.n());
      const FieldConfig lhs = scale_fields(p, scale_fields(q, c)), rhs = scale_fields(compose(p, q), c);
      CHECK((lhs.u - rhs.u).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((lhs.s - rhs.s).cwiseAbs().maxCoeff() < 1e-12);
      const FieldConfig back = scale_fields(p, scale_fields(p, c), ScaleDirection::inverse);
      CHECK((back.u - c.u).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((back.s - c.s).cwiseAbs().maxCoeff() < 1e-12);
      const FieldConfig via_inverse = scale_fields(inverse(p), scale_fields(p, c));
      CHECK((via_inverse.u - c.u).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("rescaled weights are exactly symmetric") {
    Philox rng(2, 0);
    const Graph g = load_graph(fixture_path("star.json"));
    const Graph ga = rescale_weights(random_params(rng, g.n()), g);
    CHECK(ga.weights() == ga.weights().transpose());
  }

  TEST_CASE("A^{W^a}(u - log a) = A^W(u)") {
    Philox rng(3, 0);
    const Graph g = load_graph(fixture_path("path.json"));
    const ScaleParams p = random_params(rng, g.n());
    const FieldConfig c = random_config(rng, g.n());
    const Eigen::MatrixXd lhs = build_A(rescale_weights(p, g), c.u - p.a.array().log().matrix());
    CHECK((lhs - build_A(g, c.u)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("density ratio matches the Radon-Nikodym factor pointwise") {
    Philox rng(4, 0);
    for (const char* f : {"edge.json", "triangle.json", "star.json"}) {
      const Graph g = load_graph(fixture_path(f));
      for (int t = 0; t < 30; ++t) {
        const ScaleParams p = random_params(rng, g.n());
        const FieldConfig c = random_config(rng, g.n());
        CHECK(density_ratio(g, p, c) == doctest::Approx(radon_nikodym(g, p, c)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("theta conditional covariance equals H_beta on the free block") {
    Philox rng(5, 0);
    const Graph g = load_graph(fixture_path("triangle.json"));
    const FieldConfig c = random_config(rng, g.n());
    const Eigen::MatrixXd C = theta_conditional_covariance(g, c.u);
    const Eigen::MatrixXd H = h_beta(g, c.u).topLeftCorner(2, 2);
    CHECK((C - H).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("validate rejects nonpositive a and a moved pinned entry") {
    const Graph g = load_graph(fixture_path("edge.json"));
    CHECK_THROWS_AS(validate(g, ScaleParams::from_free(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Zero(1))),
                    DomainError);
    ScaleParams p = ScaleParams::identity(g);
    p.b(1) = 0.5;
    CHECK_THROWS_AS(validate(g, p), DomainError);
  }
}

#include <doctest.h>

#include <cmath>

#include "hsigma/errors.hpp"
#include "hsigma/graph.hpp"
#include "hsigma/rng.hpp"
#include "hsigma/sigma_core.hpp"
#include "hsigma/verify.hpp"

using namespace hsigma;

namespace {

FieldConfig random_config(Philox& rng, const Graph& g, double half_width) {
  Eigen::VectorXd u(g.n()), s(g.n());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u(i) = half_width * (2.0 * rng.uniform() - 1.0);
    s(i) = half_width * (2.0 * rng.uniform() - 1.0);
  }
  return FieldConfig::from_free(u, s);
}

const char* kFixtures[] = {"edge.json", "triangle.json", "star.json", "path.json"};

}  // namespace

TEST_SUITE("sigma_core") {
  TEST_CASE("A has zero row sums and the stated off-diagonal") {
    const Graph g = load_graph(fixture_path("triangle.json"));
    Philox rng(1, 0);
    const FieldConfig c = random_config(rng, g, 1.5);
    const Eigen::MatrixXd A = build_A(g, c.u);
    CHECK(A.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(A(0, 1) == doctest::Approx(-1.0 * std::exp(c.u(0) + c.u(1))));
    CHECK(A.isApprox(A.transpose()));
  }

  TEST_CASE("edge density by hand") {
    // rho = A_11 exp(-(cosh u - 1) - s^2 e^u / 2) for one edge with W = 1.
    const Graph g = load_graph(fixture_path("edge.json"));
    const double u = 0.4, s = -0.7;
    const FieldConfig c = FieldConfig::from_free(Eigen::VectorXd::Constant(1, u), Eigen::VectorXd::Constant(1, s));
    const double expected = std::exp(u) * std::exp(-(std::cosh(u) - 1.0) - 0.5 * s * s * std::exp(u));
    for (RhoMode m : {RhoMode::direct, RhoMode::quadratic, RhoMode::spinor})
      CHECK(rho_density(g, c, m).value == doctest::Approx(expected).epsilon(1e-13));
  }

  TEST_CASE("three density forms agree on every fixture") {
    Philox rng(2, 0);
    for (const char* f : kFixtures) {
      const Graph g = load_graph(fixture_path(f));
      for (int t = 0; t < 20; ++t) {
        const FieldConfig c = random_config(rng, g, 2.0);
        const double d = rho_density(g, c, RhoMode::direct).log_value;
        CHECK(rho_density(g, c, RhoMode::quadratic).log_value == doctest::Approx(d).epsilon(1e-12));
        CHECK(rho_density(g, c, RhoMode::spinor).log_value == doctest::Approx(d).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("spinor hand case") {
    CHECK(spinor_det(1.0, 0.0, 1.0, 1.0) == doctest::Approx(-1.0));
    CHECK(spinor_norm_form(1.0, 0.0, 1.0, 1.0) == doctest::Approx(-1.0));
  }

  TEST_CASE("theta matches its componentwise form") {
    Philox rng(3, 0);
    for (const char* f : kFixtures) {
      const Graph g = load_graph(fixture_path(f));
      const FieldConfig c = random_config(rng, g, 1.5);
      CHECK((compute_theta(g, c.u, c.s) - compute_theta_componentwise(g, c.u, c.s)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("beta at u = 0 is half the weighted degree") {
    const Graph g = load_graph(fixture_path("triangle.json"));
    const Eigen::VectorXd beta = compute_beta(g, Eigen::VectorXd::Zero(3));
    CHECK(beta(0) == doctest::Approx(0.5 * (1.0 + 0.8)));
    CHECK(beta(1) == doctest::Approx(0.5 * (1.0 + 1.2)));
  }

  TEST_CASE("inversions round-trip") {
    Philox rng(4, 0);
    for (const char* f : kFixtures) {
      const Graph g = load_graph(fixture_path(f));
      for (int t = 0; t < 25; ++t) {
        const FieldConfig c = random_config(rng, g, 2.0);
        const Eigen::VectorXd beta = compute_beta(g, c.u), theta = compute_theta(g, c.u, c.s);
        const Eigen::VectorXd u = u_from_beta(g, beta), s = s_from_beta_theta(g, beta, theta);
        CHECK((u - c.u).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((s - c.s).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }

  TEST_CASE("u_from_beta rejects beta outside the image") {
    const Graph g = load_graph(fixture_path("edge.json"));
    CHECK_THROWS(u_from_beta(g, Eigen::VectorXd::Constant(1, -1.0)));
  }

  TEST_CASE("log det of A_VV matches Eigen") {
    Philox rng(5, 0);
    const Graph g = load_graph(fixture_path("star.json"));
    const FieldConfig c = random_config(rng, g, 1.0);
    const Eigen::MatrixXd A = build_A(g, c.u);
    CHECK(log_det_AVV(A, g.n()) == doctest::Approx(std::log(A.topLeftCorner(3, 3).determinant())).epsilon(1e-12));
  }

  TEST_CASE("cartesian point lies on the hyperboloid with x + z = e^u") {
    Philox rng(6, 0);
    const Graph g = load_graph(fixture_path("triangle.json"));
    const FieldConfig c = random_config(rng, g, 1.5);
    const CartesianPoint p = to_cartesian(c);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = p.x[i].body(), y = p.y[i].body(), z = p.z[i].body();
      CHECK(z * z - x * x - y * y == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(x + z == doctest::Approx(std::exp(c.u(static_cast<Eigen::Index>(i)))).epsilon(1e-12));
    }
  }
}

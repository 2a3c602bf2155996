#include <doctest.h>

#include <cmath>

#include "hsigma/errors.hpp"
#include "hsigma/graph.hpp"
#include "hsigma/sampler.hpp"
#include "hsigma/scaling.hpp"
#include "hsigma/verify.hpp"

using namespace hsigma;

namespace {

ChainConfig small(std::size_t n, std::uint64_t seed) {
  ChainConfig cc;
  cc.n_samples = n;
  cc.seed = seed;
  return cc;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("validate rejects degenerate settings") {
    ChainConfig cc;
    cc.n_samples = 0;
    CHECK_THROWS_AS(validate(cc), DomainError);
    cc = ChainConfig{};
    cc.n_chains = 0;
    CHECK_THROWS_AS(validate(cc), DomainError);
    cc = ChainConfig{};
    cc.proposal_scale = 0.0;
    CHECK_THROWS_AS(validate(cc), DomainError);
  }

  TEST_CASE("estimates are deterministic in the seed") {
    const Graph g = load_graph(fixture_path("triangle.json"));
    auto f = [](const SampleView& v) { return std::exp(v.u(0)) + v.s(1); };
    const Estimate a = expect(g, f, small(4000, 5)), b = expect(g, f, small(4000, 5)), c = expect(g, f, small(4000, 6));
    CHECK(a.mean(0) == b.mean(0));
    CHECK(a.std_error(0) == b.std_error(0));
    CHECK(a.mean(0) != c.mean(0));
    // Rounded up so every chain fills the same number of equal batches.
    CHECK(a.n_samples >= 4000);
    CHECK(a.n_samples <= 4000 + 4 * 33);
  }

  TEST_CASE("retained draws are finite with the pinned vertex at zero") {
    const Graph g = load_graph(fixture_path("star.json"));
    std::size_t count = 0;
    for_each_sample(g, small(400, 2), [&](std::size_t chain, const SampleView& v) {
      CHECK(chain < 4);
      CHECK(v.u(3) == 0.0);
      CHECK(v.s(3) == 0.0);
      CHECK(v.u.allFinite());
      CHECK(v.s.allFinite());
      ++count;
    });
    CHECK(count == 400);
  }

  TEST_CASE("edge Laplace transform within four standard errors") {
    const Graph g = load_graph(fixture_path("edge.json"));
    const ScaleParams p = ScaleParams::from_free(Eigen::VectorXd::Constant(1, 1.2), Eigen::VectorXd::Constant(1, 0.3));
    const Estimate e = expect(
        g,
        [&](const SampleView& v) {
          return std::exp(-laplace_exponent(p, compute_beta(g, v.u), compute_theta(g, v.u, v.s)));
        },
        small(100000, 3));
    CHECK(std::abs(e.mean(0) - laplace_closed_form(g, p)) < 4.0 * e.std_error(0));
    CHECK(e.max_rhat() < 1.05);
    CHECK(e.acceptance > 0.1);
    CHECK(e.acceptance < 0.9);
  }

  TEST_CASE("s given u has covariance A_VV^{-1}") {
    const Graph g = load_graph(fixture_path("triangle.json"));
    Eigen::VectorXd u(3);
    u << 0.3, -0.4, 0.0;
    const Eigen::MatrixXd C = build_A(g, u).topLeftCorner(2, 2).inverse();
    Philox rng(8, 0);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2, 2);
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
      const Eigen::VectorXd s = sample_s_given_u(g, u, rng);
      CHECK(s(2) == 0.0);
      acc += s.head(2) * s.head(2).transpose();
    }
    acc /= n;
    // Entrywise stderr is at most sqrt(2 / n) C_max ~ 0.5%; 3% is far outside.
    CHECK((acc - C).cwiseAbs().maxCoeff() < 0.03 * C.cwiseAbs().maxCoeff());
  }

  TEST_CASE("non-finite observables raise EstimationFailure") {
    const Graph g = load_graph(fixture_path("edge.json"));
    CHECK_THROWS_AS(expect(g, [](const SampleView&) { return std::nan(""); }, small(100, 1)), EstimationFailure);
  }

  TEST_CASE("super_expect of 1 is exactly 1") {
    const Graph g = load_graph(fixture_path("triangle.json"));
    const SuperEstimate e = super_expect(
        g, [](const SampleView& v, const SuperContext& ctx) { return ctx.gaussian_weight(v.A); }, nullptr,
        small(2000, 1));
    CHECK(e.coeff(0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.std_error(0).real()) < 1e-12);
  }
}

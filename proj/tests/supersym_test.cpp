#include <doctest.h>

#include <cmath>

#include "hsigma/graph.hpp"
#include "hsigma/rng.hpp"
#include "hsigma/scaling.hpp"
#include "hsigma/supersym.hpp"
#include "hsigma/verify.hpp"

using namespace hsigma;

namespace {

struct Point {
  Eigen::VectorXd u, s;
  Eigen::MatrixXd A;
};

Point point(const Graph& g, Philox& rng) {
  Point p{Eigen::VectorXd::Zero(g.size()), Eigen::VectorXd::Zero(g.size()), {}};
  for (std::size_t i = 0; i < g.n(); ++i) {
    p.u(static_cast<Eigen::Index>(i)) = 2.0 * rng.uniform() - 1.0;
    p.s(static_cast<Eigen::Index>(i)) = 2.0 * rng.uniform() - 1.0;
  }
  p.A = build_A(g, p.u);
  return p;
}

GroupElement random_group(const Graph& g, const AlgebraPtr& params, Philox& rng) {
  const auto c1 = GrassmannElement::generator(params, 0), c2 = GrassmannElement::generator(params, 1);
  std::vector<GrassmannElement> a, b, cb, c;
  for (std::size_t i = 0; i < g.n(); ++i) {
    a.push_back(GrassmannElement(params, 0.6 + rng.uniform()) + c1 * c2 * (rng.uniform() - 0.5));
    b.push_back(GrassmannElement(params, rng.uniform() - 0.5) + c1 * c2 * (rng.uniform() - 0.5));
    cb.push_back(c1 * (rng.uniform() - 0.5));
    c.push_back(c2 * (rng.uniform() - 0.5));
  }
  return extend_group(g, a, b, cb, c, params);
}

// Even observable touching every coordinate of the first two vertices.
const SuperObservable kProbe{[](const SuperPoint& p) {
                               GrassmannElement x = p.u[0] * p.s[0] + exp(p.u[0] * 0.5) +
                                                    p.psibar[0] * p.psi[0] * (p.s[0] + 2.0);
                               if (p.u.size() > 1) x += p.psibar[0] * p.psi[1] * p.u[1] + p.s[1] * p.s[1];
                               return to_complex(x);
                             },
                             Parity::even};

}  // namespace

TEST_SUITE("supersym") {
  TEST_CASE("phi matches its componentwise form") {
    Philox rng(1, 0);
    for (const char* f : {"edge.json", "triangle.json", "star.json"}) {
      const Graph g = load_graph(fixture_path(f));
      const AlgebraPtr alg = make_field_algebra(g.labels());
      const Point p = point(g, rng);
      for (PhiKind k : {PhiKind::phi, PhiKind::phibar}) {
        const auto a = compute_phi(g, p.u, k, alg), b = compute_phi_componentwise(g, p.u, k, alg);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].approx_equal(b[i], 1e-12));
      }
    }
  }

  TEST_CASE("Berezin integral of the superdensity is rho") {
    Philox rng(2, 0);
    for (const char* f : {"edge.json", "triangle.json", "path.json"}) {
      const Graph g = load_graph(fixture_path(f));
      const AlgebraPtr alg = make_field_algebra(g.labels());
      const Point p = point(g, rng);
      const FieldConfig cfg{p.u, p.s};
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < g.n(); ++i) pairs.emplace_back(2 * i, 2 * i + 1);
      const double top = berezin_integral(bold_rho(g, cfg, alg), pairs).body();
      CHECK(top == doctest::Approx(rho_density(g, cfg, RhoMode::direct).value).epsilon(1e-12));
    }
  }

  TEST_CASE("Grassmann closed form reduces to the real one for real group elements") {
    const Graph g = load_graph(fixture_path("triangle.json"));
    const ScaleParams p =
        ScaleParams::from_free((Eigen::VectorXd(2) << 1.2, 0.9).finished(), (Eigen::VectorXd(2) << 0.3, -0.2).finished());
    CHECK(laplace_closed_form(g, p.to_group()).body() == doctest::Approx(laplace_closed_form(g, p)).epsilon(1e-14));
  }

  TEST_CASE("scaling Jacobian has superdeterminant 1") {
    Philox rng(3, 0);
    const AlgebraPtr params = make_algebra({"c1", "c2"});
    const Graph g = load_graph(fixture_path("triangle.json"));
    for (int t = 0; t < 10; ++t) {
      const Point p = point(g, rng);
      CHECK(sdet(super_jacobian(random_group(g, params, rng), p.u)).approx_equal(GrassmannElement(params, 1.0), 1e-12));
    }
  }

  TEST_CASE("pullbacks compose in reverse order and invert") {
    Philox rng(4, 0);
    const AlgebraPtr params = make_algebra({"c1", "c2"});
    const Graph g = load_graph(fixture_path("triangle.json"));
    const SuperContext ctx(g, params);
    for (int t = 0; t < 5; ++t) {
      const Point p = point(g, rng);
      const SampleView view{g, p.u, p.s, p.A, 0.0};
      const SuperPoint x = sample_point(ctx, view);
      const GroupElement v = random_group(g, params, rng), w = random_group(g, params, rng);
      const ComplexGrassmann base = kProbe.eval(x);
      const ComplexGrassmann round = super_scale_pullback(v.inverse(), super_scale_pullback(v, kProbe, ctx), ctx).eval(x);
      CHECK(round.approx_equal(base, 1e-10));
      const ComplexGrassmann lhs = super_scale_pullback(v, super_scale_pullback(w, kProbe, ctx), ctx).eval(x);
      const ComplexGrassmann rhs = super_scale_pullback(w * v, kProbe, ctx).eval(x);
      CHECK(lhs.approx_equal(rhs, 1e-10));
    }
  }

  TEST_CASE("Grassmann-weighted measure stays normalized") {
    const Graph g = load_graph(fixture_path("edge.json"));
    const AlgebraPtr params = make_algebra({"cbar", "c"});
    const auto cb = GrassmannElement::generator(params, 0), c = GrassmannElement::generator(params, 1);
    const std::vector<GrassmannElement> a{GrassmannElement(params, 1.1) + cb * c * 0.25, GrassmannElement(params, 1.0)};
    const GMatrix wp = rescale_weights(a, g);
    Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(2, 2);
    w0(0, 1) = w0(1, 0) = wp(0, 1).body();
    ChainConfig cc;
    cc.n_samples = 50000;
    const SuperEstimate e = super_expect_weighted(
        g.with_weights(w0), wp, [](const SampleView&, const SuperContext& ctx) { return ComplexGrassmann(ctx.algebra, 1.0); },
        params, cc);
    CHECK(e.coeff(0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.coeff(0b11).real()) < 4.0 * e.std_error(0b11).real());
  }
}

#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "hsigma/errors.hpp"
#include "hsigma/grassmann.hpp"
#include "hsigma/rng.hpp"

using namespace hsigma;

namespace {

double u01(Philox& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Even element with body `body` and random quadratic and quartic soul over 4 generators.
GrassmannElement random_even(Philox& rng, const AlgebraPtr& alg, double body) {
  GrassmannElement x(alg, body);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      x += GrassmannElement::generator(alg, i) * GrassmannElement::generator(alg, j) * u01(rng, -1, 1);
  x += GrassmannElement::monomial(alg, 0b1111, u01(rng, -1, 1));
  return x;
}

GrassmannElement random_odd(Philox& rng, const AlgebraPtr& alg) {
  GrassmannElement x(alg, 0.0);
  for (std::size_t i = 0; i < 4; ++i) x += GrassmannElement::generator(alg, i) * u01(rng, -1, 1);
  return x;
}

}  // namespace

TEST_SUITE("grassmann") {
  TEST_CASE("generators anticommute and square to zero") {
    const AlgebraPtr alg = make_algebra({"a", "b", "c"});
    const auto a = GrassmannElement::generator(alg, "a"), b = GrassmannElement::generator(alg, "b");
    CHECK((a * b + b * a).is_zero());
    CHECK((a * a).is_zero());
    CHECK((a * b).coeff(0b011) == doctest::Approx(1.0));
    CHECK((b * a).coeff(0b011) == doctest::Approx(-1.0));
    CHECK(a.is_odd());
    CHECK((a * b).is_even());
  }

  TEST_CASE("monomial sign counts transpositions") {
    CHECK(monomial_sign(0b01, 0b10) == 1);
    CHECK(monomial_sign(0b10, 0b01) == -1);
    CHECK(monomial_sign(0b110, 0b001) == 1);
    CHECK(monomial_sign(0b001, 0b001) == 0);
  }

  TEST_CASE("mixing algebras throws") {
    const auto x = GrassmannElement::generator(make_algebra({"a"}), 0);
    const auto y = GrassmannElement::generator(make_algebra({"b"}), 0);
    CHECK_THROWS_AS(x * y, AlgebraMismatch);
  }

  TEST_CASE("even functions satisfy their scalar identities") {
    const AlgebraPtr alg = make_algebra({"g1", "g2", "g3", "g4"});
    Philox rng(7, 0);
    for (int t = 0; t < 20; ++t) {
      const GrassmannElement x = random_even(rng, alg, u01(rng, 0.3, 3.0));
      CHECK(exp(log(x)).approx_equal(x, 1e-12));
      CHECK((sqrt(x) * sqrt(x)).approx_equal(x, 1e-12));
      CHECK((inverse(x) * x).approx_equal(GrassmannElement(alg, 1.0), 1e-12));
      CHECK((cosh(x) * cosh(x) - sinh(x) * sinh(x)).approx_equal(GrassmannElement(alg, 1.0), 1e-10));
      const GrassmannElement y = random_even(rng, alg, u01(rng, -1.0, 1.0));
      CHECK((exp(x) * exp(y)).approx_equal(exp(x + y), 1e-10));
    }
  }

  TEST_CASE("log rejects a nonpositive body") {
    const AlgebraPtr alg = make_algebra({"g1", "g2"});
    CHECK_THROWS_AS(log(GrassmannElement(alg, -1.0)), DomainError);
  }

  TEST_CASE("Gaussian Berezin integral equals det A") {
    Philox rng(11, 0);
    for (std::size_t n = 1; n <= 4; ++n) {
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
      const AlgebraPtr alg = make_field_algebra(labels);
      Eigen::MatrixXd A(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A(i, j) = u01(rng, -1, 1);
      GrassmannElement q(alg, 0.0);
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < n; ++i) {
        pairs.emplace_back(2 * i, 2 * i + 1);
        for (std::size_t j = 0; j < n; ++j)
          q += GrassmannElement::generator(alg, 2 * i) * GrassmannElement::generator(alg, 2 * j + 1) * A(i, j);
      }
      const GrassmannElement top = berezin_integral(exp(-q), pairs);
      CHECK(top.body() == doctest::Approx(A.determinant()).epsilon(1e-12));
    }
  }

  TEST_CASE("Grassmann determinant is multiplicative") {
    const AlgebraPtr alg = make_algebra({"g1", "g2", "g3", "g4"});
    Philox rng(3, 0);
    for (std::size_t n = 1; n <= 3; ++n) {
      GMatrix M(n, n), N(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          M(i, j) = random_even(rng, alg, u01(rng, -1, 1) + (i == j ? 2.0 : 0.0));
          N(i, j) = random_even(rng, alg, u01(rng, -1, 1) + (i == j ? 2.0 : 0.0));
        }
      CHECK(det(M * N).approx_equal(det(M) * det(N), 1e-10));
      CHECK((M * inverse(M)).approx_equal(GMatrix::identity(n), 1e-10));
    }
  }

  TEST_CASE("superdeterminant of a 1|1 block and its multiplicativity") {
    const AlgebraPtr alg = make_algebra({"g1", "g2", "g3", "g4"});
    Philox rng(5, 0);
    auto make = [&] {
      GMatrix a(1, 1), s(1, 1), g(1, 1), b(1, 1);
      a(0, 0) = random_even(rng, alg, u01(rng, 0.5, 2.0));
      b(0, 0) = random_even(rng, alg, u01(rng, 0.5, 2.0));
      s(0, 0) = random_odd(rng, alg);
      g(0, 0) = random_odd(rng, alg);
      return SuperMatrix(a, s, g, b);
    };
    for (int t = 0; t < 10; ++t) {
      const SuperMatrix M = make(), N = make();
      const GrassmannElement expected =
          (M.A()(0, 0) - M.Sigma()(0, 0) * inverse(M.B()(0, 0)) * M.Gamma()(0, 0)) * inverse(M.B()(0, 0));
      CHECK(sdet(M).approx_equal(expected, 1e-12));
      CHECK(sdet(M * N).approx_equal(sdet(M) * sdet(N), 1e-10));
    }
  }

  TEST_CASE("group law: identity, inverse, associativity") {
    const AlgebraPtr alg = make_algebra({"g1", "g2", "g3", "g4"});
    Philox rng(9, 0);
    auto make = [&] {
      std::vector<GrassmannElement> a, b, cb, c;
      for (int i = 0; i < 2; ++i) {
        a.push_back(random_even(rng, alg, u01(rng, 0.5, 2.0)));
        b.push_back(random_even(rng, alg, u01(rng, -1.0, 1.0)));
        cb.push_back(random_odd(rng, alg));
        c.push_back(random_odd(rng, alg));
      }
      a.emplace_back(alg, 1.0);
      for (auto* v : {&b, &cb, &c}) v->emplace_back(alg, 0.0);
      return GroupElement(a, b, cb, c);
    };
    const GroupElement e = GroupElement::identity(3, alg);
    for (int t = 0; t < 10; ++t) {
      const GroupElement x = make(), y = make(), z = make();
      CHECK((x * e).approx_equal(x));
      CHECK((e * x).approx_equal(x));
      CHECK((x * x.inverse()).approx_equal(e, 1e-10));
      CHECK((x.inverse() * x).approx_equal(e, 1e-10));
      CHECK(((x * y) * z).approx_equal(x * (y * z), 1e-10));
      CHECK(group_op(x, y, GroupOp::mul).approx_equal(x * y));
    }
  }

  TEST_CASE("real group elements multiply as 2x2 matrices [[a, b], [0, 1]]") {
    const GroupElement x = GroupElement::real({1.5, 1.0}, {0.25, 0.0});
    const GroupElement y = GroupElement::real({0.5, 1.0}, {-2.0, 0.0});
    const GroupElement xy = x * y;
    CHECK(xy.a(0).body() == doctest::Approx(0.75));
    CHECK(xy.b(0).body() == doctest::Approx(1.5 * -2.0 + 0.25));
  }
}

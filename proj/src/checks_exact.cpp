#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>

#include "checks.hpp"
#include "hsigma/errors.hpp"
#include "hsigma/grassmann.hpp"
#include "hsigma/sigma_core.hpp"
#include "hsigma/supersym.hpp"

namespace hsigma::detail {

namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double max_coeff(const GrassmannElement& x) {
  double m = 0.0;
  for (const auto& t : x.terms()) m = std::max(m, std::abs(t.second));
  return m;
}

double rel_log_deviation(double log_x, double log_ref) { return std::abs(std::expm1(log_x - log_ref)); }

// body + scale * (random coefficients on every nonempty even monomial).
GrassmannElement random_even(Philox& rng, const AlgebraPtr& alg, double body, double scale) {
  GrassmannElement x(alg, body);
  for (Mask m = 1; m < (Mask{1} << alg->size()); ++m)
    if (std::popcount(m) % 2 == 0) x += GrassmannElement::monomial(alg, m, scale * uniform(rng, -1.0, 1.0));
  return x;
}

GrassmannElement random_odd(Philox& rng, const AlgebraPtr& alg, double scale) {
  GrassmannElement x(alg, 0.0);
  for (Mask m = 1; m < (Mask{1} << alg->size()); ++m)
    if (std::popcount(m) % 2 == 1) x += GrassmannElement::monomial(alg, m, scale * uniform(rng, -1.0, 1.0));
  return x;
}

Graph single_edge() { return Graph::from_edges({"1"}, "delta", {{"1", "delta", 1.0}}); }

// Coefficients of a parameter-algebra element as [re, im] per mask.
Eigen::VectorXd flatten(const ComplexGrassmann& x, std::size_t n_params) {
  const std::size_t k = std::size_t{1} << n_params;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(idx(2 * k));
  for (const auto& [m, c] : x.terms()) {
    out(idx(2 * m)) = c.real();
    out(idx(2 * m + 1)) = c.imag();
  }
  return out;
}

void compare_flat(ReportBuilder& rb, const std::string& label, const Eigen::VectorXd& value,
                  const ComplexGrassmann& reference, const AlgebraPtr& params, double tol) {
  const std::size_t n = params ? params->size() : 0;
  const Eigen::VectorXd ref = flatten(reference, n);
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    const auto names = subset_names(params, m);
    const double vr = value(idx(2 * m)), vi = value(idx(2 * m + 1));
    const double rr = ref(idx(2 * m)), ri = ref(idx(2 * m + 1));
    if (vr != 0.0 || rr != 0.0 || m == 0) rb.deterministic(label + " re", vr, rr, tol, names);
    if (std::abs(vi) > 0.0 || ri != 0.0) rb.deterministic(label + " im", vi, ri, tol, names);
  }
}

}  // namespace

double uniform(Philox& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

Graph random_graph(Philox& rng, std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
  auto name = [&](std::size_t k) { return k == 0 ? std::string("delta") : labels[k - 1]; };
  std::vector<std::tuple<std::string, std::string, double>> edges;
  std::vector<std::vector<bool>> used(n + 1, std::vector<bool>(n + 1, false));
  for (std::size_t k = 1; k <= n; ++k) {
    const auto parent = std::min<std::size_t>(k - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(k)));
    used[k][parent] = used[parent][k] = true;
    edges.emplace_back(name(k), name(parent), uniform(rng, 0.2, 2.0));
  }
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j)
      if (!used[i][j] && rng.uniform() < 0.4) edges.emplace_back(name(i), name(j), uniform(rng, 0.2, 2.0));
  return Graph::from_edges(labels, "delta", edges);
}

FieldConfig random_config(Philox& rng, const Graph& g, double lo, double hi) {
  FieldConfig cfg = FieldConfig::zero(g);
  for (std::size_t i = 0; i < g.n(); ++i) {
    cfg.u(idx(i)) = uniform(rng, lo, hi);
    cfg.s(idx(i)) = uniform(rng, lo, hi);
  }
  return cfg;
}

QuadratureResult laplace_quadrature(const Graph& g, double a, double b) {
  if (g.n() != 1) throw DomainError("quadrature oracle needs exactly one free vertex");
  const ScaleParams p = ScaleParams::from_free(Eigen::VectorXd::Constant(1, a), Eigen::VectorXd::Constant(1, b));
  // theta_1 = k t with k = e^{-u} sqrt(A_11); the tilt moves the Gaussian centre in t to -b k.
  auto geometry = [&](double u) {
    Eigen::VectorXd uu = Eigen::VectorXd::Zero(2);
    uu(0) = u;
    const double a11 = build_A(g, uu)(0, 0);
    return std::pair{std::sqrt(a11), std::exp(-u) * std::sqrt(a11)};
  };
  return integrate_2d(
      [&](double u, double t) {
        const auto [sq, k] = geometry(u);
        (void)k;
        FieldConfig cfg = FieldConfig::zero(g);
        cfg.u(0) = u;
        cfg.s(0) = t / sq;
        // Log domain: far in the u tails the density underflows while the tilt overflows.
        const double log_w = rho_density(g, cfg, RhoMode::direct).log_value - u - std::log(kTwoPi * sq);
        const Eigen::VectorXd beta = compute_beta(g, cfg.u), theta = compute_theta(g, cfg.u, cfg.s);
        Eigen::VectorXd out(2);
        out << std::exp(log_w - laplace_exponent(p, beta, theta)), std::exp(log_w);
        return out;
      },
      -10.0, 10.0,
      [&](double u) {
        const double c = -b * geometry(u).second;
        return std::pair{std::min(c, 0.0) - 12.0, std::max(c, 0.0) + 12.0};
      },
      1e-10, 1e-10);
}

void check_rho_equivalence(ReportBuilder& rb, const CheckEnv& env) {
  Philox rng = env.rng(0);
  double dev_q = 0.0, dev_s = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Graph g = random_graph(rng, 1 + static_cast<std::size_t>(t % 4));
    const FieldConfig cfg = random_config(rng, g, -2.0, 2.0);
    const double d = rho_density(g, cfg, RhoMode::direct).log_value;
    dev_q = std::max(dev_q, rel_log_deviation(rho_density(g, cfg, RhoMode::quadratic).log_value, d));
    dev_s = std::max(dev_s, rel_log_deviation(rho_density(g, cfg, RhoMode::spinor).log_value, d));
  }
  rb.deterministic("max relative deviation quadratic vs direct", dev_q, 0.0, 1e-12);
  rb.deterministic("max relative deviation spinor vs direct", dev_s, 0.0, 1e-12);
}

void check_spinor_identity(ReportBuilder& rb, const CheckEnv& env) {
  Philox rng = env.rng(0);
  double dev = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double ai = uniform(rng, 0.5, 2.0), bi = uniform(rng, -1.0, 1.0);
    const double aj = uniform(rng, 0.5, 2.0), bj = uniform(rng, -1.0, 1.0);
    const double x = spinor_det(ai, bi, aj, bj), y = spinor_norm_form(ai, bi, aj, bj);
    dev = std::max(dev, std::abs(x - y) / std::max(1.0, std::abs(y)));
  }
  rb.deterministic("max relative deviation det vs norm form", dev, 0.0, 1e-12);
  rb.deterministic("hand case det", spinor_det(1.0, 0.0, 1.0, 1.0), -1.0, 1e-12);
  rb.deterministic("hand case norm form", spinor_norm_form(1.0, 0.0, 1.0, 1.0), -1.0, 1e-12);
}

void check_A_scale_invariance(ReportBuilder& rb, const CheckEnv& env) {
  Philox rng = env.rng(0);
  // Real: A^{W^a}(u - log a) = A^W(u).
  double dev = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Graph g = random_graph(rng, 1 + static_cast<std::size_t>(t % 4));
    const FieldConfig cfg = random_config(rng, g, -2.0, 2.0);
    Eigen::VectorXd a = Eigen::VectorXd::Ones(idx(g.size()));
    for (std::size_t i = 0; i < g.n(); ++i) a(idx(i)) = uniform(rng, 0.5, 2.0);
    const ScaleParams p{a, Eigen::VectorXd::Zero(idx(g.size()))};
    const Eigen::MatrixXd A0 = build_A(g, cfg.u);
    const Eigen::MatrixXd A1 = build_A(rescale_weights(p, g), cfg.u - a.array().log().matrix());
    dev = std::max(dev, (A1 - A0).cwiseAbs().maxCoeff() / std::max(1.0, A0.cwiseAbs().maxCoeff()));
  }
  rb.deterministic("real a: max relative deviation", dev, 0.0, 1e-12);

  // Grassmann a: the same identity coefficientwise.
  const AlgebraPtr params = make_algebra({"c1bar", "c1", "c2bar", "c2"});
  double gdev = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Graph g = random_graph(rng, 1 + static_cast<std::size_t>(t % 3));
    const FieldConfig cfg = random_config(rng, g, -1.5, 1.5);
    std::vector<GrassmannElement> a, u_shift, u0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      a.push_back(i < g.n() ? random_even(rng, params, uniform(rng, 0.5, 2.0), 0.3) : GrassmannElement(params, 1.0));
      u0.emplace_back(params, cfg.u(idx(i)));
      u_shift.push_back(u0.back() - log(a.back()));
    }
    GMatrix W(g.size(), g.size());
    for (const Edge& e : g.edges()) W(e.i, e.j) = W(e.j, e.i) = GrassmannElement(params, e.w);
    const GMatrix A0 = build_A(W, u0), A1 = build_A(rescale_weights(a, g), u_shift);
    double scale = 1.0, diff = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) {
        scale = std::max(scale, max_coeff(A0(i, j)));
        diff = std::max(diff, max_coeff(A1(i, j) - A0(i, j)));
      }
    gdev = std::max(gdev, diff / scale);
  }
  rb.deterministic("grassmann a: max relative coefficient deviation", gdev, 0.0, 1e-12);
}

void check_zeta_scaling(ReportBuilder& rb, const CheckEnv&) {
  constexpr double w2 = 0.49, cu = 0.2, cs = -0.3;
  auto bump = [&](double u, double s) { return std::exp(-((u - cu) * (u - cu) + (s - cs) * (s - cs)) / (2.0 * w2)); };
  const Graph g = single_edge();

  // Real: int f o S dzeta = a int f dzeta.
  for (const auto& ab : {std::pair{1.3, 0.4}, std::pair{0.7, -0.6}}) {
    const double a = ab.first, b = ab.second;
    const ScaleParams p = ScaleParams::from_free(Eigen::VectorXd::Constant(1, a), Eigen::VectorXd::Constant(1, b));
    auto zeta = [&](bool pulled) {
      const double uc = pulled ? cu - std::log(a) : cu;
      return integrate_2d(
          [&](double u, double s) {
            double x = bump(u, s);
            if (pulled) {
              const FieldConfig c = scale_fields(p, FieldConfig::from_free(Eigen::VectorXd::Constant(1, u),
                                                                           Eigen::VectorXd::Constant(1, s)));
              x = bump(c.u(0), c.s(0));
            }
            return Eigen::VectorXd::Constant(1, x * std::exp(-u) / kTwoPi);
          },
          uc - 7.0, uc + 7.0,
          [&](double u) {
            const double sc = pulled ? cs + std::exp(-u) * b / a : cs;
            return std::pair{sc - 7.0, sc + 7.0};
          },
          1e-10, 1e-10);
    };
    const QuadratureResult lhs = zeta(true), rhs = zeta(false);
    if (!lhs.converged || !rhs.converged) rb.note("real zeta quadrature did not reach its tolerance");
    rb.deterministic("real a=" + std::to_string(a) + " b=" + std::to_string(b), lhs.value(0), a * rhs.value(0),
                     1e-6);
  }

  // Super: int dzeta S*_v f = (prod a) int dzeta f with Grassmann parameters.
  const AlgebraPtr params = make_algebra({"cbar", "c"});
  const GrassmannElement cb = GrassmannElement::generator(params, 0), c = GrassmannElement::generator(params, 1);
  const GrassmannElement a = GrassmannElement(params, 1.3) + cb * c * 0.2;
  const GrassmannElement b = GrassmannElement(params, 0.4) - cb * c * 0.1;
  const GroupElement v({a, GrassmannElement(params, 1.0)}, {b, GrassmannElement(params, 0.0)},
                       {cb * 0.5, GrassmannElement(params, 0.0)}, {c * -0.3, GrassmannElement(params, 0.0)});
  const SuperContext ctx(g, params);
  const SuperObservable f{[&](const SuperPoint& p) {
                            const GrassmannElement du = p.u[0] - cu, ds = p.s[0] - cs;
                            const GrassmannElement bmp = exp((du * du + ds * ds) * (-1.0 / (2.0 * w2)));
                            return to_complex(bmp * (GrassmannElement(0.5) + p.psibar[0] * p.psi[0]));
                          },
                          Parity::even};
  const SuperObservable pulled = super_scale_pullback(v, f, ctx);
  auto super_zeta = [&](const SuperObservable& obs, double uc, double bshift) {
    return integrate_2d(
        [&](double u, double s) {
          SuperPoint p;
          p.u = {GrassmannElement(ctx.algebra, u)};
          p.s = {GrassmannElement(ctx.algebra, s)};
          p.psibar = {GrassmannElement::generator(ctx.algebra, 0)};
          p.psi = {GrassmannElement::generator(ctx.algebra, 1)};
          const ComplexGrassmann h = obs.eval(p) * cplx(std::exp(-u) / kTwoPi);
          return flatten(ctx.project(berezin_integral(h, ctx.pairs())), params->size());
        },
        uc - 7.0, uc + 7.0,
        [&](double u) {
          const double sc = cs + std::exp(-u) * bshift;
          return std::pair{sc - 7.0, sc + 7.0};
        },
        1e-10, 1e-10);
  };
  const QuadratureResult lhs = super_zeta(pulled, cu - std::log(a.body()), b.body() / a.body());
  const QuadratureResult rhs = super_zeta(f, cu, 0.0);
  if (!lhs.converged || !rhs.converged) rb.note("super zeta quadrature did not reach its tolerance");
  ComplexGrassmann base(params, cplx(rhs.value(0), rhs.value(1)));
  compare_flat(rb, "super", lhs.value, to_complex(a) * base, params, 1e-6);
}

void check_marginal_lemma(ReportBuilder& rb, const CheckEnv& env) {
  Philox rng = env.rng(0);
  double dev_berezin = 0.0, dev_gdet = 0.0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(t % 4);
    Eigen::MatrixXd A(idx(n), idx(n));
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = uniform(rng, -1.0, 1.0);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
    const AlgebraPtr alg = make_field_algebra(labels);
    GrassmannElement expo(alg, 0.0);
    GMatrix G(n, n);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      pairs.emplace_back(2 * i, 2 * i + 1);
      for (std::size_t j = 0; j < n; ++j) {
        expo -= GrassmannElement::generator(alg, 2 * i) * GrassmannElement::generator(alg, 2 * j + 1) * A(idx(i), idx(j));
        G(i, j) = GrassmannElement(A(idx(i), idx(j)));
      }
    }
    const double d = A.determinant();
    dev_berezin = std::max(dev_berezin, std::abs(berezin_integral(exp(expo), pairs).body() - d));
    dev_gdet = std::max(dev_gdet, std::abs(det(G).body() - d));
  }
  rb.deterministic("max |berezin gaussian - det A|", dev_berezin, 0.0, 1e-12);
  rb.deterministic("max |grassmann det - det A|", dev_gdet, 0.0, 1e-12);

  double dev_rho = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Graph g = random_graph(rng, 1 + static_cast<std::size_t>(t % 3));
    const FieldConfig cfg = random_config(rng, g, -1.5, 1.5);
    const AlgebraPtr alg = make_field_algebra(g.labels());
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < g.n(); ++i) pairs.emplace_back(2 * i, 2 * i + 1);
    const double marginal = berezin_integral(bold_rho(g, cfg, alg), pairs).body();
    const RhoValue rho = rho_density(g, cfg, RhoMode::direct);
    dev_rho = std::max(dev_rho, std::abs(marginal / rho.value - 1.0));
  }
  rb.deterministic("max relative |berezin bold rho - rho|", dev_rho, 0.0, 1e-12);

  const Graph g = env.graph("triangle");
  const SuperEstimate one = super_expect(
      g, [](const SampleView& s, const SuperContext& ctx) { return ctx.gaussian_weight(s.A); }, nullptr,
      env.chain(20000));
  rb.trace("super_expect(1)", one.raw);
  rb.deterministic("super_expect(1)", one.coeff(0).real(), 1.0, 1e-12);
  rb.deterministic("super_expect(1) stderr", one.std_error(0).real(), 0.0, 1e-12);
}

void check_jacobian_sdet(ReportBuilder& rb, const CheckEnv& env) {
  Philox rng = env.rng(0);
  const AlgebraPtr params = make_algebra({"g1", "g2", "g3", "g4"});
  double dev = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(t % 3);
    std::vector<GrassmannElement> a, b, cb, c;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(random_even(rng, params, uniform(rng, 0.5, 2.0), 0.5));
      b.push_back(random_even(rng, params, uniform(rng, -1.0, 1.0), 0.5));
      cb.push_back(random_odd(rng, params, 0.5));
      c.push_back(random_odd(rng, params, 0.5));
    }
    a.emplace_back(params, 1.0);
    b.emplace_back(params, 0.0);
    cb.emplace_back(params, 0.0);
    c.emplace_back(params, 0.0);
    Eigen::VectorXd u(idx(n + 1));
    for (std::size_t i = 0; i < n; ++i) u(idx(i)) = uniform(rng, -2.0, 2.0);
    u(idx(n)) = 0.0;
    const GroupElement v(a, b, cb, c);
    dev = std::max(dev, max_coeff(sdet(super_jacobian(v, u)) - GrassmannElement(params, 1.0)));
  }
  rb.deterministic("max |sdet jacobian - 1|", dev, 0.0, 1e-12);

  double mdev = 0.0;
  auto random_super = [&](std::size_t p, std::size_t q) {
    auto block = [&](std::size_t r, std::size_t cc, bool even, bool diag) {
      GMatrix m(r, cc);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < cc; ++j)
          m(i, j) = even ? random_even(rng, params, (diag && i == j ? 2.0 : 0.0) + uniform(rng, -0.5, 0.5), 0.3)
                         : random_odd(rng, params, 0.3);
      return m;
    };
    return SuperMatrix(block(p, p, true, true), block(p, q, false, false), block(q, p, false, false),
                       block(q, q, true, true));
  };
  for (int t = 0; t < 20; ++t) {
    const std::size_t p = 1 + static_cast<std::size_t>(t % 2), q = 1 + static_cast<std::size_t>((t / 2) % 2);
    const SuperMatrix M = random_super(p, q), N = random_super(p, q);
    const GrassmannElement lhs = sdet(M * N), rhs = sdet(M) * sdet(N);
    mdev = std::max(mdev, max_coeff(lhs - rhs) / std::max(1.0, max_coeff(rhs)));
  }
  rb.deterministic("max relative |sdet(MN) - sdet(M) sdet(N)|", mdev, 0.0, 1e-12);
}

void check_cartesian_horospherical(ReportBuilder& rb, const CheckEnv& env) {
  const Graph g = env.graph("edge");
  if (g.n() != 1) throw DomainError("cartesian-horospherical needs exactly one free vertex");
  constexpr double alpha = -1.0, kappa = 0.3;
  // Both test functions are written once in cartesian variables and evaluated in either chart.
  auto test_functions = [&](const GrassmannElement& x, const GrassmannElement& y, const GrassmannElement& z,
                            const GrassmannElement& xi, const GrassmannElement& eta) {
    const ComplexGrassmann ward = exp(to_complex(x + z) * cplx(alpha) + to_complex(y) * cplx(0.0, alpha));
    const ComplexGrassmann window =
        to_complex(exp((x * x + y * y) * -kappa) * (GrassmannElement(1.0) + xi * eta * 0.5));
    return std::pair{ward, window};
  };
  auto pack = [](const ComplexGrassmann& w1, const ComplexGrassmann& w2) {
    Eigen::VectorXd out(4);
    out << w1.body().real(), w1.body().imag(), w2.body().real(), w2.body().imag();
    return out;
  };

  const AlgebraPtr cart = make_algebra({"xi", "eta"});
  const std::vector<std::pair<std::size_t, std::size_t>> cart_pair{{0, 1}};
  const QuadratureResult lhs = integrate_2d(
      [&](double x, double y) {
        CartesianPoint p;
        const GrassmannElement xi = GrassmannElement::generator(cart, 0), eta = GrassmannElement::generator(cart, 1);
        const GrassmannElement z = sqrt(GrassmannElement(cart, 1.0 + x * x + y * y) + xi * eta * 2.0);
        p.x = {GrassmannElement(cart, x), GrassmannElement(cart, 0.0)};
        p.y = {GrassmannElement(cart, y), GrassmannElement(cart, 0.0)};
        p.z = {z, GrassmannElement(cart, 1.0)};
        p.xi = {xi, GrassmannElement(cart, 0.0)};
        p.eta = {eta, GrassmannElement(cart, 0.0)};
        const ComplexGrassmann weight = to_complex(exp(s_cart(g, p)) * inverse(z)) * cplx(1.0 / kTwoPi);
        const auto [f1, f2] = test_functions(p.x[0], p.y[0], z, xi, eta);
        return pack(berezin_integral(weight * f1, cart_pair), berezin_integral(weight * f2, cart_pair));
      },
      -40.0, 40.0, [](double) { return std::pair{-40.0, 40.0}; }, 1e-8, 1e-10);

  const AlgebraPtr hor = make_field_algebra(g.labels());
  const std::vector<std::pair<std::size_t, std::size_t>> hor_pair{{0, 1}};
  auto sqrt_a11 = [&](double u) {
    Eigen::VectorXd uu = Eigen::VectorXd::Zero(2);
    uu(0) = u;
    return std::sqrt(build_A(g, uu)(0, 0));
  };
  const QuadratureResult rhs = integrate_2d(
      [&](double u, double t) {
        const double sq = sqrt_a11(u);
        const FieldConfig cfg =
            FieldConfig::from_free(Eigen::VectorXd::Constant(1, u), Eigen::VectorXd::Constant(1, t / sq));
        const GrassmannElement pb = GrassmannElement::generator(hor, 0), ps = GrassmannElement::generator(hor, 1);
        const CartesianPoint p = to_cartesian(cfg, {pb}, {ps});
        const ComplexGrassmann weight = to_complex(bold_rho(g, cfg, hor)) * cplx(std::exp(-u) / (kTwoPi * sq));
        const auto [f1, f2] = test_functions(p.x[0], p.y[0], p.z[0], p.xi[0], p.eta[0]);
        return pack(berezin_integral(weight * f1, hor_pair), berezin_integral(weight * f2, hor_pair));
      },
      -10.0, 10.0, [](double) { return std::pair{-12.0, 12.0}; }, 1e-8, 1e-10);

  if (!lhs.converged || !rhs.converged) rb.note("cartesian/horospherical quadrature did not reach its tolerance");
  const char* names[] = {"ward re", "ward im", "window re", "window im"};
  for (Eigen::Index k = 0; k < 4; ++k) rb.deterministic(std::string("cartesian vs horospherical ") + names[k],
                                                        lhs.value(k), rhs.value(k), 1e-5);
  rb.deterministic("cartesian ward vs e^alpha", lhs.value(0), std::exp(alpha), 1e-5);
  rb.deterministic("horospherical ward vs e^alpha", rhs.value(0), std::exp(alpha), 1e-5);
}

}  // namespace hsigma::detail

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include "checks.hpp"
#include "hsigma/errors.hpp"
#include "hsigma/grassmann.hpp"
#include "hsigma/sigma_core.hpp"
#include "hsigma/supersym.hpp"

namespace hsigma::detail {

namespace {

using cplx = std::complex<double>;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string fmt(const Eigen::VectorXd& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v(i));
  return out + ")";
}

// Standard error must shrink like 1/sqrt(N); the gate is 2e-3 at 10^6 samples.
double stderr_gate(std::size_t n_samples) { return 2e-3 * std::sqrt(1e6 / static_cast<double>(n_samples)); }

ScaleParams uniform_params(const Graph& g, double a, double b) {
  return ScaleParams::from_free(Eigen::VectorXd::Constant(idx(g.n()), a), Eigen::VectorXd::Constant(idx(g.n()), b));
}

void laplace_points(ReportBuilder& rb, const std::string& label, const Graph& g, const std::vector<ScaleParams>& pts,
                    const ChainConfig& cc) {
  const Estimate est = expect(
      g,
      [&](const SampleView& s, double* out) {
        const Eigen::VectorXd beta = compute_beta(s.graph, s.u), theta = compute_theta(s.graph, s.u, s.s);
        for (std::size_t k = 0; k < pts.size(); ++k) out[k] = std::exp(-laplace_exponent(pts[k], beta, theta));
      },
      pts.size(), cc);
  rb.trace(label, est);
  const auto n = idx(g.n());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto ki = idx(k);
    const std::string name = label + " a=" + fmt(Eigen::VectorXd(pts[k].a.head(n))) +
                             " b=" + fmt(Eigen::VectorXd(pts[k].b.head(n)));
    const double closed = laplace_closed_form(g, pts[k]);
    rb.statistical(name, est.mean(ki), est.std_error(ki), closed);
    rb.deterministic(name + " stderr gate", est.std_error(ki), 0.0, stderr_gate(cc.n_samples));
    if (g.n() == 1) {
      const QuadratureResult q = laplace_quadrature(g, pts[k].a(0), pts[k].b(0));
      if (!q.converged) rb.note(name + ": quadrature did not reach its tolerance");
      rb.deterministic(name + " quadrature", q.value(0), closed, 1e-6);
      if (k == 0) rb.deterministic(label + " quadrature normalization", q.value(1), 1.0, 1e-6);
    }
  }
}

// Per-level tilt parameters: positions in the level cycle through fixed values.
MartingaleSpec tilt_spec(const std::vector<std::string>& level, const AlgebraPtr& params) {
  static const double as[] = {1.2, 0.9, 1.1}, bs[] = {0.3, -0.2, 0.1};
  MartingaleSpec spec;
  spec.params = params;
  for (std::size_t i = 0; i < level.size(); ++i) {
    spec.a[level[i]] = GrassmannElement(params, as[i % 3]);
    spec.b[level[i]] = GrassmannElement(params, bs[i % 3]);
  }
  return spec;
}

ScaleParams level_params(const Graph& g, const MartingaleSpec& spec) {
  ScaleParams p = ScaleParams::identity(g);
  for (const auto& [lab, x] : spec.a) p.a(idx(g.index(lab))) = x.body();
  for (const auto& [lab, x] : spec.b) p.b(idx(g.index(lab))) = x.body();
  return p;
}

std::size_t martingale_level(const GraphTower& tower) {
  if (tower.n_levels() < 2) throw DomainError("tower needs at least two levels");
  return std::min<std::size_t>(1, tower.n_levels() - 2);
}

// Three distinct labels (j, l, m) from level n where possible; repeats on tiny levels.
std::array<std::string, 3> pick_labels(const std::vector<std::string>& level) {
  const std::size_t sz = level.size(), mid = sz / 2;
  return {level[mid], level[(mid + 1) % sz], level[(mid + sz - 1) % sz]};
}

// Two independent level estimates of vector observables against references and each other.
void two_level(ReportBuilder& rb, const std::string& label, std::size_t n, const std::vector<std::string>& names,
               const std::vector<double>& refs, const Estimate& e0, const Estimate& e1) {
  for (std::size_t q = 0; q < names.size(); ++q) {
    const auto qi = idx(q);
    rb.statistical(label + " level " + std::to_string(n) + " " + names[q], e0.mean(qi), e0.std_error(qi), refs[q]);
    rb.statistical(label + " level " + std::to_string(n + 1) + " " + names[q], e1.mean(qi), e1.std_error(qi),
                   refs[q]);
    rb.two_sample(label + " levels " + names[q], e0.mean(qi), e0.std_error(qi), e1.mean(qi), e1.std_error(qi));
  }
}

}  // namespace

void check_theta_conditional(ReportBuilder& rb, const CheckEnv& env) {
  const Graph g = env.graph("triangle");
  const std::size_t n = g.n();
  Philox rng = env.rng(0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(idx(g.size()));
  for (std::size_t i = 0; i < n; ++i) u(idx(i)) = uniform(rng, -1.0, 1.0);
  const Eigen::MatrixXd H = h_beta(g, u).topLeftCorner(idx(n), idx(n));
  const Eigen::MatrixXd C = theta_conditional_covariance(g, u);
  rb.deterministic("covariance formula vs H_beta", (C - H).cwiseAbs().maxCoeff(), 0.0, 1e-12);

  const std::size_t N = env.chain(100000).n_samples;
  Philox draw = env.rng(1);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(idx(n)), sum2 = sum;
  Eigen::MatrixXd prod = Eigen::MatrixXd::Zero(idx(n), idx(n)), prod2 = prod;
  for (std::size_t k = 0; k < N; ++k) {
    const Eigen::VectorXd th = compute_theta(g, u, sample_s_given_u(g, u, draw));
    sum += th;
    sum2 += th.cwiseProduct(th);
    const Eigen::MatrixXd p = th * th.transpose();
    prod += p;
    prod2 += p.cwiseProduct(p);
  }
  const double dn = static_cast<double>(N);
  // theta has known mean 0, so E[theta_i theta_j] is the covariance.
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = idx(i);
    const double m = sum(ii) / dn;
    rb.statistical("mean theta_" + g.label(i), m, std::sqrt((sum2(ii) / dn - m * m) / dn), 0.0);
    for (std::size_t j = i; j < n; ++j) {
      const auto jj = idx(j);
      const double c = prod(ii, jj) / dn;
      rb.statistical("cov theta_" + g.label(i) + " theta_" + g.label(j), c,
                     std::sqrt((prod2(ii, jj) / dn - c * c) / dn), H(ii, jj));
    }
  }
}

void check_radon_nikodym(ReportBuilder& rb, const CheckEnv& env) {
  Philox rng = env.rng(0);
  double dev = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Graph g = random_graph(rng, 1 + static_cast<std::size_t>(t % 4));
    const FieldConfig cfg = random_config(rng, g, -2.0, 2.0);
    ScaleParams p = ScaleParams::identity(g);
    for (std::size_t i = 0; i < g.n(); ++i) {
      p.a(idx(i)) = uniform(rng, 0.5, 2.0);
      p.b(idx(i)) = uniform(rng, -1.0, 1.0);
    }
    dev = std::max(dev, std::abs(std::expm1(std::log(radon_nikodym(g, p, cfg)) - std::log(density_ratio(g, p, cfg)))));
  }
  rb.deterministic("pointwise max relative deviation", dev, 0.0, 1e-10);

  // E_W[f e^{-<a^2+b^2-1,beta> - <b,theta>}] = L E_{W^a}[f o S] for Gaussian bumps f.
  const Graph g = env.graph("edge");
  const ScaleParams p = uniform_params(g, 1.2, 0.3);
  constexpr std::size_t kBumps = 5;
  constexpr double w2 = 0.49;
  std::vector<Eigen::VectorXd> cu, cs;
  for (std::size_t k = 0; k < kBumps; ++k) {
    Eigen::VectorXd x(idx(g.n())), y(idx(g.n()));
    for (std::size_t i = 0; i < g.n(); ++i) {
      x(idx(i)) = uniform(rng, -0.5, 0.5);
      y(idx(i)) = uniform(rng, -0.5, 0.5);
    }
    cu.push_back(x);
    cs.push_back(y);
  }
  auto bumps = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& s, double scale, double* out) {
    const auto n = idx(cu[0].size());
    for (std::size_t k = 0; k < kBumps; ++k) {
      const double r2 = (u.head(n) - cu[k]).squaredNorm() + (s.head(n) - cs[k]).squaredNorm();
      out[k] = scale * std::exp(-r2 / (2.0 * w2));
    }
  };
  const Estimate lhs = expect(
      g,
      [&](const SampleView& v, double* out) {
        const Eigen::VectorXd beta = compute_beta(v.graph, v.u), theta = compute_theta(v.graph, v.u, v.s);
        bumps(v.u, v.s, std::exp(-laplace_exponent(p, beta, theta)), out);
      },
      kBumps, env.chain(1000000, 1));
  const double L = laplace_closed_form(g, p);
  const Estimate rhs = expect(
      rescale_weights(p, g),
      [&](const SampleView& v, double* out) {
        const FieldConfig c = scale_fields(p, FieldConfig{v.u, v.s});
        bumps(c.u, c.s, L, out);
      },
      kBumps, env.chain(1000000, 2));
  rb.trace("lhs", lhs);
  rb.trace("rhs", rhs);
  for (std::size_t k = 0; k < kBumps; ++k) {
    const auto ki = idx(k);
    rb.two_sample("bump " + std::to_string(k) + " centre u=" + fmt(cu[k]) + " s=" + fmt(cs[k]), lhs.mean(ki),
                  lhs.std_error(ki), rhs.mean(ki), rhs.std_error(ki));
  }
}

void check_laplace_real(ReportBuilder& rb, const CheckEnv& env) {
  const ChainConfig cc = env.chain(1000000, 1);
  if (env.custom_graph()) {
    const Graph g = env.graph("edge");
    laplace_points(rb, "graph", g,
                   {uniform_params(g, 1.2, 0.3), uniform_params(g, 0.9, -0.2), uniform_params(g, 1.5, -0.5),
                    uniform_params(g, 1.1, 0.1)},
                   cc);
    return;
  }
  const Graph edge = env.graph("edge");
  laplace_points(rb, "edge", edge,
                 {uniform_params(edge, 1.2, 0.3), uniform_params(edge, 0.9, -0.2), uniform_params(edge, 1.5, -0.5),
                  uniform_params(edge, 1.1, 0.1)},
                 cc);
  const Graph tri = env.graph("triangle");
  auto pt = [](double a1, double a2, double b1, double b2) {
    return ScaleParams::from_free(Eigen::Vector2d(a1, a2), Eigen::Vector2d(b1, b2));
  };
  laplace_points(rb, "triangle", tri,
                 {pt(1.2, 0.9, 0.3, -0.2), pt(0.9, 1.1, -0.1, 0.2), pt(1.4, 1.0, 0.4, 0.0)}, env.chain(1000000, 2));
}

void check_laplace_grassmann(ReportBuilder& rb, const CheckEnv& env) {
  const AlgebraPtr params = make_algebra({"cbar", "c"});
  const GrassmannElement cb = GrassmannElement::generator(params, 0), c = GrassmannElement::generator(params, 1);
  const GrassmannElement zero(params, 0.0);
  const ChainConfig cc = env.chain(200000, 1);
  const Graph g = env.graph("edge");
  const std::size_t n = g.n();
  struct Case {
    std::string name;
    GrassmannElement a, b;
  };
  const std::vector<Case> cases{
      {"real a", GrassmannElement(params, 1.2), GrassmannElement(params, 0.3)},
      {"grassmann a", GrassmannElement(params, 1.1) + cb * c * 0.25, GrassmannElement(params, 0.2) + cb * c * 0.1}};
  std::uint64_t salt = 1;
  for (const Case& k : cases) {
    const GroupElement v = extend_group(g, std::vector(n, k.a), std::vector(n, k.b), std::vector(n, cb),
                                        std::vector(n, c), params);
    grassmann_laplace_check(rb, k.name, g, v, env.chain(cc.n_samples, salt++));
    if (n == 1) {
      const QuadratureResult q = laplace_quadrature(g, k.a.body(), k.b.body());
      if (!q.converged) rb.note(k.name + ": quadrature did not reach its tolerance");
      rb.deterministic(k.name + " body quadrature", q.value(0), laplace_closed_form(g, v).body(), 1e-6);
    }
  }
  if (env.custom_graph()) return;
  // Two free vertices: the pair chibar_1, chi_2 enters the closed form through the edge 1-2.
  const Graph tri = env.graph("triangle");
  const GroupElement v = extend_group(tri, {GrassmannElement(params, 1.2), GrassmannElement(params, 0.9)},
                                      {GrassmannElement(params, 0.3), GrassmannElement(params, -0.2)}, {cb, zero},
                                      {zero, c}, params);
  grassmann_laplace_check(rb, "triangle", tri, v, env.chain(cc.n_samples, salt));
}

void check_consistency(ReportBuilder& rb, const CheckEnv& env) {
  const GraphTower tower = env.tower("line_tower");
  const AlgebraPtr params = make_algebra({"cbar", "c"});
  const GrassmannElement cb = GrassmannElement::generator(params, 0), c = GrassmannElement::generator(params, 1);
  const std::size_t last = std::min<std::size_t>(2, tower.n_levels() - 1);
  if (last == 0) throw DomainError("tower needs at least two levels");
  for (std::size_t n = 0; n < last; ++n) {
    const auto& level = tower.level(n);
    MartingaleSpec spec = tilt_spec(level, params);
    spec.a[level.front()] += cb * c * 0.2;
    spec.chibar[level.front()] = cb;
    spec.chi[level.back()] = c;
    consistency_check(rb, "n=" + std::to_string(n), tower, n, spec, env.chain(200000, n + 1));
  }
}

void check_martingale_generating(ReportBuilder& rb, const CheckEnv& env) {
  const GraphTower tower = env.tower("line_tower");
  const std::size_t n = martingale_level(tower);
  const auto& level = tower.level(n);
  const std::string j = level.front(), l = level.back();
  const ChainConfig cc = env.chain(100000);

  // Real tilt; alpha also charges a vertex outside V_n when the universe has one.
  {
    MartingaleSpec spec = tilt_spec(level, nullptr);
    spec.alpha[j] = -0.5;
    std::string outside;
    for (const auto& v : tower.universe())
      if (std::find(level.begin(), level.end(), v) == level.end()) {
        outside = v;
        break;
      }
    spec.alpha[outside.empty() ? l : outside] += -0.3;
    susy_martingale_check(rb, "real", tower, n, spec, env.chain(cc.n_samples, 1));
  }
  // Odd tau on two vertices.
  {
    const AlgebraPtr params = make_algebra({"t1", "t2"});
    MartingaleSpec spec;
    spec.params = params;
    spec.alpha[j] = -0.5;
    spec.alpha[l] += -0.3;
    spec.tau[j] = GrassmannElement::generator(params, 0);
    spec.tau[l] = spec.tau[l] + GrassmannElement::generator(params, 1);
    susy_martingale_check(rb, "tau", tower, n, spec, env.chain(cc.n_samples, 2));
  }
  // Odd chibar, chi with a tilt.
  {
    const AlgebraPtr params = make_algebra({"cbar", "c"});
    MartingaleSpec spec;
    spec.params = params;
    spec.alpha[l] = -0.4;
    spec.a[j] = GrassmannElement(params, 1.1);
    spec.b[l] = GrassmannElement(params, 0.2);
    spec.chibar[j] = GrassmannElement::generator(params, 0);
    spec.chi[l] = GrassmannElement::generator(params, 1);
    susy_martingale_check(rb, "chi", tower, n, spec, env.chain(cc.n_samples, 3));
  }
}

void check_martingale_derivatives(ReportBuilder& rb, const CheckEnv& env) {
  const GraphTower tower = env.tower("zline_tower");
  const std::size_t n = martingale_level(tower);
  const auto [j, l, m] = pick_labels(tower.level(n));
  const std::vector<std::vector<std::string>> sets{{j}, {j, l}, {j, l, m}, {j, j}};
  // a >= 1 on j, l, m damps the ramps in u that carry the heavy tails of e^{u_j + u_l + u_m}.
  MartingaleSpec spec;
  spec.a[j] = GrassmannElement(1.3);
  spec.a[l] = GrassmannElement(1.2);
  spec.a[m] = GrassmannElement(1.1);
  spec.b[j] = GrassmannElement(0.2);
  spec.b[m] = GrassmannElement(-0.1);

  std::vector<Estimate> est;
  for (std::size_t k : {n, n + 1}) {
    const Graph g = wired_subgraph(tower, k);
    const ScaleParams p = level_params(g, spec);
    std::vector<std::vector<std::size_t>> at;
    for (const auto& set : sets) {
      at.emplace_back();
      for (const auto& lab : set) at.back().push_back(g.index(lab));
    }
    est.push_back(expect(
        g,
        [&](const SampleView& s, double* out) {
          const Eigen::VectorXd beta = compute_beta(s.graph, s.u), theta = compute_theta(s.graph, s.u, s.s);
          const double tilt = std::exp(-laplace_exponent(p, beta, theta));
          for (std::size_t q = 0; q < at.size(); ++q) {
            cplx mj = tilt;
            for (std::size_t i : at[q]) mj *= std::exp(s.u(idx(i))) * cplx(1.0, s.s(idx(i)));
            out[2 * q] = mj.real();
            out[2 * q + 1] = mj.imag();
          }
        },
        2 * sets.size(), env.chain(2000000, k + 1)));
    rb.trace("level " + std::to_string(k), est.back());
  }
  const Graph gn = wired_subgraph(tower, n);
  const ScaleParams pn = level_params(gn, spec);
  const double L = laplace_closed_form(gn, pn);
  std::vector<std::string> names;
  std::vector<double> refs;
  for (const auto& set : sets) {
    cplx ref = L;
    std::string name = "M";
    for (const auto& lab : set) {
      const auto i = idx(gn.index(lab));
      ref *= cplx(pn.a(i), -pn.b(i));
      name += "_" + lab;
    }
    names.push_back(name + " re");
    refs.push_back(ref.real());
    names.push_back(name + " im");
    refs.push_back(ref.imag());
  }
  two_level(rb, "tilted", n, names, refs, est[0], est[1]);
}

void check_martingale_special_cases(ReportBuilder& rb, const CheckEnv& env) {
  const GraphTower tower = env.tower("zline_tower");
  const std::size_t n = martingale_level(tower);
  const auto [j, l, m] = pick_labels(tower.level(n));
  // The processes as listed, each written out; expectations at alpha = 0 are 1 (real parts
  // of M_J) or 0 (imaginary parts). The cubic terms at level n+1 have per-sample kurtosis
  // near 5e5, so the mean needs about 1e7 draws to be close to Gaussian.
  const std::vector<std::string> names{"s_j e^{u_j}",
                                       "e^{u_j+u_l}(1-s_j s_l)",
                                       "e^{u_j+u_l}(s_j+s_l)",
                                       "e^{2u_j}(1-s_j^2)",
                                       "2 s_j e^{2u_j}",
                                       "e^{u_j+u_l+u_m}(1-s_j s_l-s_j s_m-s_l s_m)",
                                       "e^{u_j+u_l+u_m}(s_j+s_l+s_m-s_j s_l s_m)",
                                       "e^{3u_j}(1-3s_j^2)",
                                       "e^{3u_j}(3s_j-s_j^3)"};
  const std::vector<double> refs{0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0};
  std::vector<Estimate> est;
  for (std::size_t k : {n, n + 1}) {
    const Graph g = wired_subgraph(tower, k);
    const auto ij = idx(g.index(j)), il = idx(g.index(l)), im = idx(g.index(m));
    est.push_back(expect(
        g,
        [&](const SampleView& v, double* out) {
          const double sj = v.s(ij), sl = v.s(il), sm = v.s(im);
          const double ej = std::exp(v.u(ij)), ejl = std::exp(v.u(ij) + v.u(il));
          const double ejlm = std::exp(v.u(ij) + v.u(il) + v.u(im));
          out[0] = sj * ej;
          out[1] = ejl * (1.0 - sj * sl);
          out[2] = ejl * (sj + sl);
          out[3] = ej * ej * (1.0 - sj * sj);
          out[4] = 2.0 * sj * ej * ej;
          out[5] = ejlm * (1.0 - sj * sl - sj * sm - sl * sm);
          out[6] = ejlm * (sj + sl + sm - sj * sl * sm);
          out[7] = ej * ej * ej * (1.0 - 3.0 * sj * sj);
          out[8] = ej * ej * ej * (3.0 * sj - sj * sj * sj);
        },
        names.size(), env.chain(10000000, k + 1)));
    rb.trace("level " + std::to_string(k), est.back());
  }
  rb.note("j=" + j + " l=" + l + " m=" + m);
  two_level(rb, "g=1", n, names, refs, est[0], est[1]);
}

void check_ward(ReportBuilder& rb, const CheckEnv& env) {
  if (env.custom_graph()) {
    const Graph g = env.graph("edge");
    const std::size_t n = g.n();
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(idx(g.size()));
    alpha.head(idx(n)).setConstant(-1.0 / static_cast<double>(n));
    const AlgebraPtr params = n >= 2 ? make_algebra({"t1", "t2"}) : nullptr;
    std::vector<GrassmannElement> tau;
    if (params) {
      tau.assign(n, GrassmannElement(params, 0.0));
      tau[0] = GrassmannElement::generator(params, 0);
      tau[1] = GrassmannElement::generator(params, 1);
    }
    ward_check(rb, "graph", g, alpha, tau, params, env.chain(500000, 1));
    return;
  }
  const Graph edge = env.graph("edge");
  ward_check(rb, "edge alpha=-1", edge, Eigen::Vector2d(-1.0, 0.0), {}, nullptr, env.chain(500000, 1));
  const Graph tri = env.graph("triangle");
  const AlgebraPtr params = make_algebra({"t1", "t2"});
  ward_check(rb, "triangle alpha=(-0.5, -0.3) tau=(t1, t2)", tri, Eigen::Vector3d(-0.5, -0.3, 0.0),
             {GrassmannElement::generator(params, 0), GrassmannElement::generator(params, 1)}, params,
             env.chain(200000, 2));
}

void check_image_measure_super(ReportBuilder& rb, const CheckEnv& env) {
  const Graph g = env.graph("edge");
  const std::size_t n = g.n();
  const AlgebraPtr params = make_algebra({"cbar", "c"});
  const GrassmannElement cb = GrassmannElement::generator(params, 0), c = GrassmannElement::generator(params, 1);
  constexpr double w2 = 0.64, cu = 0.1, cs = -0.2;
  const SuperObservable f{[](const SuperPoint& p) {
                            const GrassmannElement du = p.u[0] - cu, ds = p.s[0] - cs;
                            const GrassmannElement bump = exp((du * du + ds * ds) * (-1.0 / (2.0 * w2)));
                            return to_complex(bump * (GrassmannElement(0.5) + p.psibar[0] * p.psi[0]));
                          },
                          Parity::even};
  auto vec = [n](const GrassmannElement& x) { return std::vector<GrassmannElement>(n, x); };
  const GroupElement real_a = extend_group(g, vec(GrassmannElement(params, 1.2)), vec(GrassmannElement(params, 0.3)),
                                           vec(cb * 0.5), vec(c * -0.4), params);
  super_image_measure_check(rb, "real a", g, real_a, f, env.chain(200000, 1));
  const GroupElement grass_a =
      extend_group(g, vec(GrassmannElement(params, 1.1) + cb * c * 0.25),
                   vec(GrassmannElement(params, 0.2) + cb * c * 0.1), vec(cb), vec(c), params);
  super_image_measure_check(rb, "grassmann a", g, grass_a, f, env.chain(200000, 2));
}

}  // namespace hsigma::detail

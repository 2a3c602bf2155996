#include "hsigma/supersym.hpp"

#include <algorithm>
#include <cmath>

#include "hsigma/errors.hpp"
#include "hsigma/rng.hpp"
#include "hsigma/scaling.hpp"

namespace hsigma {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

AlgebraPtr params_of(const GroupElement& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (const GrassmannElement* x : {&v.a(i), &v.b(i), &v.chibar(i), &v.chi(i)})
      if (x->algebra()) return x->algebra();
  }
  return nullptr;
}

bool has_soul(const GroupElement& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!v.a(i).is_scalar()) return true;
  return false;
}

ComplexGrassmann complex_scalar(const SuperContext& ctx, cplx z) { return ComplexGrassmann(ctx.algebra, z); }

ChainConfig reseeded(const ChainConfig& cc, std::uint64_t salt) {
  ChainConfig out = cc;
  out.seed = mix_seed(cc.seed ^ (0x5bd1e995ull * (salt + 1)));
  return out;
}

}  // namespace

SuperPoint sample_point(const SuperContext& ctx, const SampleView& view) {
  SuperPoint p;
  const std::size_t n = ctx.n_vertices;
  p.u.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.u.emplace_back(ctx.algebra, view.u(idx(i)));
    p.s.emplace_back(ctx.algebra, view.s(idx(i)));
    p.psibar.push_back(GrassmannElement::generator(ctx.algebra, 2 * i));
    p.psi.push_back(GrassmannElement::generator(ctx.algebra, 2 * i + 1));
  }
  return p;
}

std::vector<GrassmannElement> compute_phi(const Graph& g, const Eigen::VectorXd& u, PhiKind kind,
                                          const AlgebraPtr& algebra) {
  const std::size_t n = g.n();
  const std::string prefix = kind == PhiKind::phi ? "psi_" : "psibar_";
  const Eigen::MatrixXd A = build_A(g, u);
  std::vector<GrassmannElement> gen;
  for (std::size_t j = 0; j < n; ++j) gen.push_back(GrassmannElement::generator(algebra, prefix + g.label(j)));
  std::vector<GrassmannElement> out(n, GrassmannElement(algebra, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double emu = std::exp(-u(idx(i)));
    for (std::size_t j = 0; j < n; ++j) {
      const double c = emu * A(idx(i), idx(j));
      if (c != 0.0) out[i] += gen[j] * c;
    }
  }
  return out;
}

std::vector<GrassmannElement> compute_phi_componentwise(const Graph& g, const Eigen::VectorXd& u, PhiKind kind,
                                                        const AlgebraPtr& algebra) {
  const std::size_t n = g.n();
  const std::string prefix = kind == PhiKind::phi ? "psi_" : "psibar_";
  std::vector<GrassmannElement> gen;
  for (std::size_t j = 0; j < n; ++j) gen.push_back(GrassmannElement::generator(algebra, prefix + g.label(j)));
  gen.emplace_back(algebra, 0.0);  // pinned
  std::vector<GrassmannElement> out(n, GrassmannElement(algebra, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g.w(i, j) != 0.0) out[i] += (gen[i] - gen[j]) * (g.w(i, j) * std::exp(u(idx(j))));
  return out;
}

GrassmannElement bold_rho(const Graph& g, const FieldConfig& cfg, const AlgebraPtr& algebra) {
  validate(g, cfg);
  const std::size_t n = g.n();
  const Eigen::MatrixXd A = build_A(g, cfg.u);
  double log_pref = -0.5 * cfg.s.dot(A * cfg.s);
  for (const Edge& e : g.edges()) log_pref -= e.w * (std::cosh(cfg.u(idx(e.i)) - cfg.u(idx(e.j))) - 1.0);
  GrassmannElement out(algebra, std::exp(log_pref));
  for (std::size_t i = 0; i < n; ++i) {
    const GrassmannElement pb = GrassmannElement::generator(algebra, "psibar_" + g.label(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double a = A(idx(i), idx(j));
      if (a == 0.0) continue;
      const GrassmannElement p = GrassmannElement::generator(algebra, "psi_" + g.label(j));
      out *= GrassmannElement(algebra, 1.0) - pb * p * a;
    }
  }
  return out;
}

GMatrix build_A(const GMatrix& W, const std::vector<GrassmannElement>& u) {
  const std::size_t m = W.rows();
  if (W.cols() != m || u.size() != m) throw InvariantViolation("weights and u must share the vertex set");
  GMatrix A(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (W(i, j).is_zero()) continue;
      const GrassmannElement x = W(i, j) * exp(u[i] + u[j]);
      A(i, j) -= x;
      A(j, i) -= x;
      A(i, i) += x;
      A(j, j) += x;
    }
  return A;
}

SuperObservable super_scale_pullback(const GroupElement& v, const SuperObservable& f, const SuperContext& ctx) {
  if (v.size() != ctx.n_vertices + 1) throw InvariantViolation("group element does not match the vertex set");
  std::vector<GrassmannElement> a, ainv, b, cb, c;
  for (std::size_t i = 0; i < ctx.n_vertices; ++i) {
    a.push_back(ctx.lift_real(v.a(i)));
    ainv.push_back(inverse(a.back()));
    b.push_back(ctx.lift_real(v.b(i)));
    cb.push_back(ctx.lift_real(v.chibar(i)));
    c.push_back(ctx.lift_real(v.chi(i)));
  }
  auto inner = f.eval;
  return {[=](const SuperPoint& p) {
            SuperPoint q = p;
            for (std::size_t i = 0; i < a.size(); ++i) {
              const GrassmannElement emu = exp(-p.u[i]);
              q.u[i] = p.u[i] + log(a[i]);
              q.s[i] = p.s[i] - emu * b[i] * ainv[i];
              q.psibar[i] = p.psibar[i] - emu * cb[i] * ainv[i];
              q.psi[i] = p.psi[i] - emu * c[i] * ainv[i];
            }
            return inner(q);
          },
          f.parity};
}

SuperMatrix super_jacobian(const GroupElement& v, const Eigen::VectorXd& u) {
  const std::size_t n = v.size() - 1;
  if (static_cast<std::size_t>(u.size()) < n) throw InvariantViolation("u must cover the free vertices");
  const AlgebraPtr alg = params_of(v);
  GMatrix A(2 * n, 2 * n, GrassmannElement(alg, 0.0)), Sigma(2 * n, 2 * n, GrassmannElement(alg, 0.0)),
      Gamma(2 * n, 2 * n, GrassmannElement(alg, 0.0)), B(2 * n, 2 * n, GrassmannElement(alg, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const GrassmannElement w = inverse(v.a(i)) * std::exp(-u(idx(i)));
    A(2 * i, 2 * i) = GrassmannElement(alg, 1.0);
    A(2 * i + 1, 2 * i + 1) = GrassmannElement(alg, 1.0);
    A(2 * i + 1, 2 * i) = v.b(i) * w;
    Gamma(2 * i, 2 * i) = v.chibar(i) * w;
    Gamma(2 * i + 1, 2 * i) = v.chi(i) * w;
    B(2 * i, 2 * i) = GrassmannElement(alg, 1.0);
    B(2 * i + 1, 2 * i + 1) = GrassmannElement(alg, 1.0);
  }
  return SuperMatrix(std::move(A), std::move(Sigma), std::move(Gamma), std::move(B));
}

ComplexGrassmann laplace_pairing(const SuperContext& ctx, const GroupElement& v, const SampleView& view) {
  const Graph& g = view.graph;
  const std::size_t n = g.n();
  if (v.size() != g.size()) throw InvariantViolation("group element does not match the graph size");
  const Eigen::VectorXd beta = compute_beta(g, view.u);
  const Eigen::VectorXd theta = compute_theta(g, view.u, view.s);
  const auto phi = compute_phi(g, view.u, PhiKind::phi, ctx.algebra);
  const auto phibar = compute_phi(g, view.u, PhiKind::phibar, ctx.algebra);
  GrassmannElement sum(ctx.algebra, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const GrassmannElement a = ctx.lift_real(v.a(i)), b = ctx.lift_real(v.b(i));
    const GrassmannElement cb = ctx.lift_real(v.chibar(i)), c = ctx.lift_real(v.chi(i));
    sum += (a * a + b * b + cb * c * 2.0 - GrassmannElement(1.0)) * beta(idx(i));
    sum += b * theta(idx(i));
    sum += cb * phi[i] + phibar[i] * c;
  }
  return to_complex(sum);
}

ComplexGrassmann reweighted_gaussian(const SuperContext& ctx, const GMatrix& w_prime, const SampleView& view) {
  const Graph& g = view.graph;
  const std::size_t m = g.size();
  if (w_prime.rows() != m) throw InvariantViolation("weights do not match the graph size");
  std::vector<GrassmannElement> u;
  for (std::size_t i = 0; i < m; ++i) u.emplace_back(view.u(idx(i)));
  const GMatrix Ap = build_A(w_prime, u);
  GrassmannElement expo;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double sij = view.s(idx(i)) * view.s(idx(j));
      if (sij != 0.0) expo -= (Ap(i, j) - GrassmannElement(view.A(idx(i), idx(j)))) * (0.5 * sij);
    }
  for (const Edge& e : g.edges()) {
    expo -= (w_prime(e.i, e.j) - GrassmannElement(e.w)) * (std::cosh(view.u(idx(e.i)) - view.u(idx(e.j))) - 1.0);
  }
  GMatrix lifted(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) lifted(i, j) = Ap(i, j);
  return ctx.gaussian_weight(lifted) * ctx.lift(exp(expo.prune()));
}

SuperEstimate super_expect_weighted(const Graph& body, const GMatrix& w_prime,
                                    const std::function<ComplexGrassmann(const SampleView&, const SuperContext&)>& f,
                                    const AlgebraPtr& params, const ChainConfig& cc) {
  for (const Edge& e : body.edges()) {
    if (std::abs(w_prime(e.i, e.j).body() - e.w) > 1e-12 * std::max(1.0, e.w)) {
      throw InvariantViolation("sampling graph must carry the body of the weights");
    }
  }
  return super_expect(
      body, [&](const SampleView& v, const SuperContext& ctx) { return reweighted_gaussian(ctx, w_prime, v) * f(v, ctx); },
      params, cc);
}

GroupElement extend_group(const Graph& g, const std::vector<GrassmannElement>& a,
                          const std::vector<GrassmannElement>& b, const std::vector<GrassmannElement>& chibar,
                          const std::vector<GrassmannElement>& chi, const AlgebraPtr& params) {
  const std::size_t n = g.n();
  if (a.size() != n || b.size() != n || chibar.size() != n || chi.size() != n) {
    throw InvariantViolation("group entries must cover the free vertices");
  }
  auto ext = [&](std::vector<GrassmannElement> x, double pinned) {
    x.emplace_back(params, pinned);
    return x;
  };
  return GroupElement(ext(a, 1.0), ext(b, 0.0), ext(chibar, 0.0), ext(chi, 0.0));
}

void grassmann_laplace_check(ReportBuilder& rb, const std::string& label, const Graph& g, const GroupElement& v,
                             const ChainConfig& cc) {
  const AlgebraPtr params = params_of(v);
  const SuperEstimate est = super_expect(
      g,
      [&](const SampleView& s, const SuperContext& ctx) {
        return ctx.gaussian_weight(s.A) * exp(-laplace_pairing(ctx, v, s));
      },
      params, cc);
  rb.trace(label, est.raw);
  rb.grassmann(label, est, to_complex(laplace_closed_form(g, v)));
}

void super_image_measure_check(ReportBuilder& rb, const std::string& label, const Graph& g, const GroupElement& v,
                               const SuperObservable& f, const ChainConfig& cc) {
  const AlgebraPtr params = params_of(v);
  const SuperEstimate lhs = super_expect(
      g,
      [&](const SampleView& s, const SuperContext& ctx) {
        return ctx.gaussian_weight(s.A) * exp(-laplace_pairing(ctx, v, s)) * f.eval(sample_point(ctx, s));
      },
      params, cc);

  const GrassmannElement L = laplace_closed_form(g, v);
  std::vector<GrassmannElement> a;
  for (std::size_t i = 0; i < g.size(); ++i) a.push_back(v.a(i));
  const ChainConfig cc_rhs = reseeded(cc, 1);
  auto rhs_obs = [&](const SampleView& s, const SuperContext& ctx) {
    const SuperObservable pulled = super_scale_pullback(v, f, ctx);
    return ctx.lift(L) * pulled.eval(sample_point(ctx, s));
  };
  SuperEstimate rhs;
  if (!has_soul(v)) {
    Eigen::VectorXd ab(idx(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) ab(idx(i)) = v.a(i).body();
    const ScaleParams p{ab, Eigen::VectorXd::Zero(idx(g.size()))};
    const Graph ga = rescale_weights(p, g);
    rhs = super_expect(
        ga, [&](const SampleView& s, const SuperContext& ctx) { return ctx.gaussian_weight(s.A) * rhs_obs(s, ctx); },
        params, cc_rhs);
  } else {
    const GMatrix wp = rescale_weights(a, g);
    Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(idx(g.size()), idx(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) w0(idx(i), idx(j)) = wp(i, j).body();
    const Graph g0 = g.with_weights(w0);
    rhs = super_expect_weighted(g0, wp, rhs_obs, params, cc_rhs);
  }
  rb.trace(label + " lhs", lhs.raw);
  rb.trace(label + " rhs", rhs.raw);
  rb.grassmann_two_sample(label, lhs, rhs);
}

void ward_check(ReportBuilder& rb, const std::string& label, const Graph& g, const Eigen::VectorXd& alpha,
                const std::vector<GrassmannElement>& tau, const AlgebraPtr& params, const ChainConfig& cc) {
  const std::size_t n = g.n();
  if (alpha.size() < idx(n)) throw InvariantViolation("alpha must cover the free vertices");
  if ((alpha.head(idx(n)).array() > 0.0).any()) throw DomainError("alpha must be nonpositive");
  if (!tau.empty() && tau.size() != n) throw InvariantViolation("tau must cover the free vertices");
  for (const auto& t : tau)
    if (!t.is_odd() && !t.is_zero()) throw ParityError("tau must be odd");
  const SuperEstimate est = super_expect(
      g,
      [&](const SampleView& s, const SuperContext& ctx) {
        ComplexGrassmann expo = complex_scalar(ctx, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          const double eu = std::exp(s.u(idx(i)));
          expo += complex_scalar(ctx, alpha(idx(i)) * eu * cplx(1.0, s.s(idx(i))));
          if (!tau.empty() && !tau[i].is_zero()) {
            expo += ctx.lift(tau[i]) * (ctx.psibar(i) + ctx.psi(i) * kI) * cplx(eu);
          }
        }
        return ctx.gaussian_weight(s.A) * exp(expo);
      },
      params, cc);
  rb.trace(label, est.raw);
  rb.grassmann(label, est, ComplexGrassmann(params, std::exp(alpha.head(idx(n)).sum())));
}

GroupElement level_group(const GraphTower& tower, std::size_t k, const MartingaleSpec& spec) {
  const Graph g = wired_subgraph(tower, k);
  const std::size_t n = g.n();
  std::vector<GrassmannElement> a(n, GrassmannElement(spec.params, 1.0)), b(n, GrassmannElement(spec.params, 0.0)),
      cb = b, c = b;
  auto fill = [&](const std::map<std::string, GrassmannElement>& src, std::vector<GrassmannElement>& dst) {
    for (const auto& [lab, x] : src) {
      const std::size_t i = g.index(lab);
      if (i >= n) throw DomainError("parameter label " + lab + " is outside the level");
      dst[i] = x;
    }
  };
  fill(spec.a, a);
  fill(spec.b, b);
  fill(spec.chibar, cb);
  fill(spec.chi, c);
  return extend_group(g, a, b, cb, c, spec.params);
}

namespace {

void check_support(const GraphTower& tower, std::size_t n, const MartingaleSpec& spec) {
  const auto& level = tower.level(n);
  auto inside = [&](const std::string& lab) { return std::find(level.begin(), level.end(), lab) != level.end(); };
  for (const auto* m : {&spec.tau, &spec.a, &spec.b, &spec.chibar, &spec.chi})
    for (const auto& kv : *m)
      if (!inside(kv.first)) throw DomainError("parameter support must lie in V_n; found " + kv.first);
}

}  // namespace

void susy_martingale_check(ReportBuilder& rb, const std::string& label, const GraphTower& tower, std::size_t n,
                           const MartingaleSpec& spec, const ChainConfig& cc) {
  if (n + 1 >= tower.n_levels()) throw DomainError("level n+1 is not in the tower");
  check_support(tower, n, spec);
  std::vector<SuperEstimate> est;
  for (std::size_t k : {n, n + 1}) {
    const Graph g = wired_subgraph(tower, k);
    const Eigen::VectorXd alpha = extend_alpha(tower, spec.alpha, k);
    const GroupElement v = level_group(tower, k, spec);
    std::vector<GrassmannElement> tau(g.n(), GrassmannElement(spec.params, 0.0));
    for (const auto& [lab, t] : spec.tau) tau[g.index(lab)] = t;
    est.push_back(super_expect(
        g,
        [&](const SampleView& s, const SuperContext& ctx) {
          ComplexGrassmann expo = complex_scalar(ctx, alpha(idx(g.pinned_index())));
          for (std::size_t i = 0; i < g.n(); ++i) {
            const double eu = std::exp(s.u(idx(i)));
            expo += complex_scalar(ctx, alpha(idx(i)) * eu * cplx(1.0, s.s(idx(i))));
            if (!tau[i].is_zero()) expo += ctx.lift(tau[i]) * (ctx.psibar(i) + ctx.psi(i) * kI) * cplx(eu);
          }
          return ctx.gaussian_weight(s.A) * exp(expo - laplace_pairing(ctx, v, s));
        },
        spec.params, reseeded(cc, k)));
  }
  // Closed form on level n: L e^{<alpha, a - ib> - <tau, chibar + i chi>}.
  const Graph gn = wired_subgraph(tower, n);
  const GroupElement vn = level_group(tower, n, spec);
  const Eigen::VectorXd alpha = extend_alpha(tower, spec.alpha, n);
  ComplexGrassmann expo(spec.params, alpha(idx(gn.pinned_index())));
  for (std::size_t i = 0; i < gn.n(); ++i) {
    expo += (to_complex(vn.a(i)) - to_complex(vn.b(i)) * kI) * cplx(alpha(idx(i)));
  }
  for (const auto& [lab, t] : spec.tau) {
    const std::size_t i = gn.index(lab);
    expo -= to_complex(t) * (to_complex(vn.chibar(i)) + to_complex(vn.chi(i)) * kI);
  }
  const ComplexGrassmann ref = to_complex(laplace_closed_form(gn, vn)) * exp(expo);
  rb.trace(label + " level " + std::to_string(n), est[0].raw);
  rb.trace(label + " level " + std::to_string(n + 1), est[1].raw);
  rb.grassmann(label + " level " + std::to_string(n), est[0], ref);
  rb.grassmann(label + " level " + std::to_string(n + 1), est[1], ref);
  rb.grassmann_two_sample(label + " levels " + std::to_string(n) + "/" + std::to_string(n + 1), est[0], est[1]);
}

void consistency_check(ReportBuilder& rb, const std::string& label, const GraphTower& tower, std::size_t n,
                       const MartingaleSpec& params, const ChainConfig& cc) {
  if (n + 1 >= tower.n_levels()) throw DomainError("level n+1 is not in the tower");
  check_support(tower, n, params);
  const Graph g0 = wired_subgraph(tower, n), g1 = wired_subgraph(tower, n + 1);
  const GroupElement v0 = level_group(tower, n, params), v1 = level_group(tower, n + 1, params);

  // Closed forms: real bodies and full Grassmann values.
  auto bodies = [](const Graph& g, const GroupElement& v) {
    ScaleParams p = ScaleParams::identity(g);
    for (std::size_t i = 0; i < g.n(); ++i) {
      p.a(idx(i)) = v.a(i).body();
      p.b(idx(i)) = v.b(i).body();
    }
    return p;
  };
  const double l0 = laplace_closed_form(g0, bodies(g0, v0)), l1 = laplace_closed_form(g1, bodies(g1, v1));
  rb.relative(label + " closed form real", l1, l0, 1e-14);
  rb.grassmann_exact(label + " closed form grassmann", to_complex(laplace_closed_form(g1, v1)),
                     to_complex(laplace_closed_form(g0, v0)), 1e-12);

  // Moments of (beta, theta) on V_n at both levels.
  const auto& labels = tower.level(n);
  const std::size_t m = labels.size();
  struct Moment {
    std::string name;
    int kind;  // 0 beta, 1 theta, 2 beta beta, 3 theta theta, 4 beta theta
    std::size_t i, j;
  };
  std::vector<Moment> moments;
  for (std::size_t i = 0; i < m; ++i) {
    moments.push_back({"E beta_" + labels[i], 0, i, i});
    moments.push_back({"E theta_" + labels[i], 1, i, i});
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      moments.push_back({"E beta_" + labels[i] + " beta_" + labels[j], 2, i, j});
      moments.push_back({"E theta_" + labels[i] + " theta_" + labels[j], 3, i, j});
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) moments.push_back({"E beta_" + labels[i] + " theta_" + labels[j], 4, i, j});

  std::vector<Estimate> est;
  for (std::size_t k : {n, n + 1}) {
    const Graph g = wired_subgraph(tower, k);
    std::vector<std::size_t> map;
    for (const auto& lab : labels) map.push_back(g.index(lab));
    est.push_back(expect(
        g,
        [&](const SampleView& s, double* out) {
          const Eigen::VectorXd beta = compute_beta(s.graph, s.u);
          const Eigen::VectorXd theta = compute_theta(s.graph, s.u, s.s);
          for (std::size_t q = 0; q < moments.size(); ++q) {
            const Moment& mo = moments[q];
            const double bi = beta(idx(map[mo.i])), bj = beta(idx(map[mo.j]));
            const double ti = theta(idx(map[mo.i])), tj = theta(idx(map[mo.j]));
            switch (mo.kind) {
              case 0: out[q] = bi; break;
              case 1: out[q] = ti; break;
              case 2: out[q] = bi * bj; break;
              case 3: out[q] = ti * tj; break;
              default: out[q] = bi * tj; break;
            }
          }
        },
        moments.size(), reseeded(cc, k)));
  }
  rb.trace(label + " moments level " + std::to_string(n), est[0]);
  rb.trace(label + " moments level " + std::to_string(n + 1), est[1]);
  for (std::size_t q = 0; q < moments.size(); ++q) {
    const auto qi = idx(q);
    rb.two_sample(label + " " + moments[q].name, est[0].mean(qi), est[0].std_error(qi), est[1].mean(qi),
                  est[1].std_error(qi));
  }
}

}  // namespace hsigma

#include "hsigma/sigma_core.hpp"

#include <cmath>
#include <limits>

#include "hsigma/errors.hpp"

namespace hsigma {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

FieldConfig FieldConfig::zero(const Graph& g) {
  return {Eigen::VectorXd::Zero(idx(g.size())), Eigen::VectorXd::Zero(idx(g.size()))};
}

FieldConfig FieldConfig::from_free(const Eigen::VectorXd& u_v, const Eigen::VectorXd& s_v) {
  FieldConfig c{Eigen::VectorXd::Zero(u_v.size() + 1), Eigen::VectorXd::Zero(s_v.size() + 1)};
  c.u.head(u_v.size()) = u_v;
  c.s.head(s_v.size()) = s_v;
  return c;
}

void validate(const Graph& g, const FieldConfig& cfg) {
  if (static_cast<std::size_t>(cfg.u.size()) != g.size() || static_cast<std::size_t>(cfg.s.size()) != g.size()) {
    throw InvariantViolation("field configuration does not match the graph size");
  }
  const auto d = idx(g.pinned_index());
  if (cfg.u(d) != 0.0 || cfg.s(d) != 0.0) throw InvariantViolation("pinned field values must be zero");
}

Eigen::MatrixXd build_A(const Graph& g, const Eigen::VectorXd& u) {
  const auto m = idx(g.size());
  if (u.size() != m) throw InvariantViolation("u does not match the graph size");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (const Edge& e : g.edges()) {
    const auto i = idx(e.i), j = idx(e.j);
    const double x = e.w * std::exp(u(i) + u(j));
    A(i, j) -= x;
    A(j, i) -= x;
    A(i, i) += x;
    A(j, j) += x;
  }
  return A;
}

Eigen::VectorXd compute_beta_tilde(const Graph& g, const Eigen::VectorXd& u) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(idx(g.size()));
  for (const Edge& e : g.edges()) {
    const auto i = idx(e.i), j = idx(e.j);
    b(i) += 0.5 * e.w * std::exp(u(j) - u(i));
    b(j) += 0.5 * e.w * std::exp(u(i) - u(j));
  }
  return b;
}

Eigen::VectorXd compute_beta(const Graph& g, const Eigen::VectorXd& u) {
  return compute_beta_tilde(g, u).head(idx(g.n()));
}

Eigen::VectorXd compute_theta(const Graph& g, const Eigen::VectorXd& u, const Eigen::VectorXd& s) {
  const auto n = idx(g.n());
  const Eigen::MatrixXd A = build_A(g, u);
  return (-u.head(n).array()).exp().matrix().asDiagonal() * (A.topLeftCorner(n, n) * s.head(n));
}

Eigen::VectorXd compute_theta_componentwise(const Graph& g, const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& s) {
  const std::size_t n = g.n();
  Eigen::VectorXd t = Eigen::VectorXd::Zero(idx(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      t(idx(i)) += g.w(i, j) * std::exp(u(idx(j))) * (s(idx(i)) - s(idx(j)));
  return t;
}

Eigen::MatrixXd h_beta(const Graph& g, const Eigen::VectorXd& u) {
  Eigen::MatrixXd H = -g.weights();
  H.diagonal() = 2.0 * compute_beta_tilde(g, u);
  return H;
}

double log_det_AVV(const Eigen::MatrixXd& A, std::size_t n) {
  Eigen::LLT<Eigen::MatrixXd> llt(A.topLeftCorner(idx(n), idx(n)));
  if (llt.info() != Eigen::Success) throw PositiveDefinitenessError("A_VV is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double spinor_det(double ai, double bi, double aj, double bj) {
  // v v^t / a for v = [[a, b], [0, 1]].
  const double p11 = (ai * ai + bi * bi) / ai, p12 = bi / ai, p22 = 1.0 / ai;
  const double q11 = (aj * aj + bj * bj) / aj, q12 = bj / aj, q22 = 1.0 / aj;
  const double d11 = p11 - q11, d12 = p12 - q12, d22 = p22 - q22;
  return d11 * d22 - d12 * d12;
}

double spinor_norm_form(double ai, double bi, double aj, double bj) {
  // v_i^t eps v_j = [[0, -a_i], [a_j, b_j - b_i]].
  const double norm2 = ai * ai + aj * aj + (bj - bi) * (bj - bi);
  return 2.0 - norm2 / (ai * aj);
}

RhoValue rho_density(const Graph& g, const FieldConfig& cfg, RhoMode mode) {
  validate(g, cfg);
  const Eigen::MatrixXd A = build_A(g, cfg.u);
  double log_rho = log_det_AVV(A, g.n());
  switch (mode) {
    case RhoMode::direct:
      for (const Edge& e : g.edges()) {
        const double du = cfg.u(idx(e.i)) - cfg.u(idx(e.j));
        const double ds = cfg.s(idx(e.i)) - cfg.s(idx(e.j));
        log_rho -= e.w * (std::cosh(du) - 1.0 + 0.5 * ds * ds * std::exp(cfg.u(idx(e.i)) + cfg.u(idx(e.j))));
      }
      break;
    case RhoMode::quadratic: {
      const Eigen::VectorXd emu = (-cfg.u.array()).exp();
      log_rho -= 0.5 * cfg.s.dot(A * cfg.s) + 0.5 * emu.dot(A * emu);
      break;
    }
    case RhoMode::spinor:
      for (const Edge& e : g.edges()) {
        const auto i = idx(e.i), j = idx(e.j);
        log_rho += 0.5 * e.w * spinor_det(std::exp(-cfg.u(i)), cfg.s(i), std::exp(-cfg.u(j)), cfg.s(j));
      }
      break;
  }
  const double value = std::exp(log_rho);
  return {value, log_rho, value == 0.0 || value < std::numeric_limits<double>::min()};
}

namespace {

double beta_residual(const Graph& g, const Eigen::VectorXd& u, const Eigen::VectorXd& beta) {
  return max_abs(compute_beta(g, u) - beta);
}

// Damped Newton on F(u) = beta(u) - beta_target over the free coordinates.
Eigen::VectorXd newton_beta(const Graph& g, const Eigen::VectorXd& beta, Eigen::VectorXd u,
                            const InversionOptions& opts, double& residual) {
  const auto n = idx(g.n());
  residual = beta_residual(g, u, beta);
  for (int it = 0; it < opts.max_iterations && residual > opts.tolerance; ++it) {
    const Eigen::VectorXd b = compute_beta(g, u);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      J(i, i) = -b(i);
      for (Eigen::Index k = 0; k < n; ++k)
        if (k != i) J(i, k) = 0.5 * g.w(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) * std::exp(u(k) - u(i));
    }
    const Eigen::VectorXd step = J.fullPivLu().solve(-(b - beta));
    if (!step.allFinite()) break;
    double t = 1.0;
    bool improved = false;
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      Eigen::VectorXd trial = u;
      trial.head(n) += t * step;
      const double r = beta_residual(g, trial, beta);
      if (std::isfinite(r) && r < residual) {
        u = std::move(trial);
        residual = r;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return u;
}

}  // namespace

Eigen::VectorXd u_from_beta(const Graph& g, const Eigen::VectorXd& beta, const InversionOptions& opts) {
  const auto n = idx(g.n());
  if (beta.size() != n) throw InvariantViolation("beta must cover the free vertices");
  if (!beta.allFinite()) throw InversionFailure("beta has non-finite entries", std::numeric_limits<double>::infinity());
  // H_beta e^{u_V} = W_{V, pinned} is linear in e^{u_V}.
  Eigen::MatrixXd H = -g.weights().topLeftCorner(n, n);
  H.diagonal() = 2.0 * beta;
  const Eigen::VectorXd rhs = g.weights().col(idx(g.pinned_index())).head(n);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(n + 1);
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() == Eigen::Success) {
    const Eigen::VectorXd x = llt.solve(rhs);
    if ((x.array() > 0.0).all()) start.head(n) = x.array().log().matrix();
  }
  double residual = 0.0;
  Eigen::VectorXd u = newton_beta(g, beta, start, opts, residual);
  if (!(residual <= opts.tolerance)) {
    u = newton_beta(g, beta, Eigen::VectorXd::Zero(n + 1), opts, residual);
  }
  if (!(residual <= opts.tolerance)) throw InversionFailure("u_from_beta did not converge", residual);
  return u;
}

Eigen::VectorXd s_from_beta_theta(const Graph& g, const Eigen::VectorXd& beta, const Eigen::VectorXd& theta,
                                  const InversionOptions& opts) {
  const auto n = idx(g.n());
  if (theta.size() != n) throw InvariantViolation("theta must cover the free vertices");
  const Eigen::VectorXd u = u_from_beta(g, beta, opts);
  const Eigen::MatrixXd A = build_A(g, u);
  Eigen::LLT<Eigen::MatrixXd> llt(A.topLeftCorner(n, n));
  if (llt.info() != Eigen::Success) throw PositiveDefinitenessError("A_VV is not positive definite");
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n + 1);
  s.head(n) = llt.solve(u.head(n).array().exp().matrix().cwiseProduct(theta));
  return s;
}

CartesianPoint to_cartesian(const FieldConfig& cfg, const std::vector<GrassmannElement>& psibar,
                            const std::vector<GrassmannElement>& psi) {
  const auto m = static_cast<std::size_t>(cfg.u.size());
  const std::size_t n = m - 1;
  if (psibar.size() != psi.size() || (!psibar.empty() && psibar.size() != n)) {
    throw InvariantViolation("Grassmann fields must cover the free vertices");
  }
  CartesianPoint p;
  p.x.resize(m);
  p.y.resize(m);
  p.z.resize(m);
  p.xi.resize(m);
  p.eta.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = cfg.u(idx(i)), s = cfg.s(idx(i)), eu = std::exp(u);
    if (i == n) {
      p.z[i] = GrassmannElement(1.0);
      continue;
    }
    GrassmannElement q(0.5 * s * s);
    if (!psibar.empty()) {
      q += psibar[i] * psi[i];
      p.xi[i] = psibar[i] * eu;
      p.eta[i] = psi[i] * eu;
    }
    p.x[i] = GrassmannElement(std::sinh(u)) - q * eu;
    p.y[i] = GrassmannElement(s * eu);
    p.z[i] = GrassmannElement(std::cosh(u)) + q * eu;
  }
  return p;
}

GrassmannElement s_cart(const Graph& g, const CartesianPoint& p) {
  if (p.x.size() != g.size()) throw InvariantViolation("cartesian point does not match the graph size");
  GrassmannElement acc;
  for (const Edge& e : g.edges()) {
    const std::size_t i = e.i, j = e.j;
    GrassmannElement t = GrassmannElement(-1.0) - p.x[i] * p.x[j] - p.y[i] * p.y[j] + p.z[i] * p.z[j] -
                         p.xi[i] * p.eta[j] + p.eta[i] * p.xi[j];
    acc -= t * e.w;
  }
  return acc;
}

}  // namespace hsigma

#include "hsigma/scaling.hpp"

#include <cmath>

#include "hsigma/errors.hpp"

namespace hsigma {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_sizes(const ScaleParams& p, const FieldConfig& cfg) {
  if (p.a.size() != cfg.u.size() || p.b.size() != cfg.u.size()) {
    throw InvariantViolation("scale parameters do not match the field configuration");
  }
}

}  // namespace

ScaleParams ScaleParams::identity(const Graph& g) {
  return {Eigen::VectorXd::Ones(idx(g.size())), Eigen::VectorXd::Zero(idx(g.size()))};
}

ScaleParams ScaleParams::from_free(const Eigen::VectorXd& a_v, const Eigen::VectorXd& b_v) {
  if (a_v.size() != b_v.size()) throw InvariantViolation("a and b must have equal length");
  ScaleParams p{Eigen::VectorXd::Ones(a_v.size() + 1), Eigen::VectorXd::Zero(a_v.size() + 1)};
  p.a.head(a_v.size()) = a_v;
  p.b.head(b_v.size()) = b_v;
  return p;
}

GroupElement ScaleParams::to_group() const {
  return GroupElement::real(std::vector<double>(a.data(), a.data() + a.size()),
                            std::vector<double>(b.data(), b.data() + b.size()));
}

void validate(const Graph& g, const ScaleParams& p) {
  const auto m = idx(g.size());
  if (p.a.size() != m || p.b.size() != m) throw DomainError("scale parameters do not match the graph size");
  if (!p.a.allFinite() || !p.b.allFinite()) throw DomainError("scale parameters must be finite");
  if ((p.a.array() <= 0.0).any()) throw DomainError("a must be positive");
  const auto d = idx(g.pinned_index());
  if (p.a(d) != 1.0 || p.b(d) != 0.0) throw DomainError("pinned scale parameter must be [1, 0]");
}

ScaleParams compose(const ScaleParams& p, const ScaleParams& q) {
  return {p.a.cwiseProduct(q.a), p.a.cwiseProduct(q.b) + p.b};
}

ScaleParams inverse(const ScaleParams& p) {
  return {p.a.cwiseInverse(), -p.b.cwiseQuotient(p.a)};
}

FieldConfig scale_fields(const ScaleParams& p, const FieldConfig& cfg, ScaleDirection dir) {
  check_sizes(p, cfg);
  const Eigen::ArrayXd emu = (-cfg.u.array()).exp();
  FieldConfig out;
  if (dir == ScaleDirection::forward) {
    out.u = cfg.u + p.a.array().log().matrix();
    out.s = (cfg.s.array() - emu * p.b.array() / p.a.array()).matrix();
  } else {
    out.u = cfg.u - p.a.array().log().matrix();
    out.s = (cfg.s.array() + emu * p.b.array()).matrix();
  }
  return out;
}

Graph rescale_weights(const ScaleParams& p, const Graph& g) {
  validate(g, p);
  // One product per edge keeps the result exactly symmetric.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(idx(g.size()), idx(g.size()));
  for (const Edge& e : g.edges()) {
    const auto i = idx(e.i), j = idx(e.j);
    w(i, j) = w(j, i) = p.a(i) * p.a(j) * e.w;
  }
  return g.with_weights(w);
}

GMatrix rescale_weights(const std::vector<GrassmannElement>& a, const Graph& g) {
  if (a.size() != g.size()) throw DomainError("scale parameters do not match the graph size");
  for (const auto& x : a) {
    if (!x.is_even() || !(x.body() > 0.0)) throw DomainError("a must be even with positive body");
  }
  GMatrix w(g.size(), g.size());
  for (const Edge& e : g.edges()) {
    const GrassmannElement x = a[e.i] * a[e.j] * e.w;
    w(e.i, e.j) = x;
    w(e.j, e.i) = x;
  }
  return w;
}

double laplace_log(const Graph& g, const ScaleParams& p) {
  validate(g, p);
  double acc = 0.0;
  for (const Edge& e : g.edges()) {
    const auto i = idx(e.i), j = idx(e.j);
    acc -= e.w * (p.a(i) * p.a(j) + p.b(i) * p.b(j) - 1.0);
  }
  return acc - p.a.head(idx(g.n())).array().log().sum();
}

double laplace_closed_form(const Graph& g, const ScaleParams& p) { return std::exp(laplace_log(g, p)); }

GrassmannElement laplace_closed_form(const Graph& g, const GroupElement& v) {
  if (v.size() != g.size()) throw DomainError("group element does not match the graph size");
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (!(v.a(i).body() > 0.0)) throw DomainError("a must have positive body");
  }
  GrassmannElement exponent;
  for (const Edge& e : g.edges()) {
    const std::size_t i = e.i, j = e.j;
    const GrassmannElement q = v.a(i) * v.a(j) + v.b(i) * v.b(j) + v.chibar(i) * v.chi(j) +
                               v.chibar(j) * v.chi(i) - GrassmannElement(1.0);
    exponent -= q * e.w;
  }
  GrassmannElement out = exp(exponent);
  for (std::size_t j = 0; j < g.n(); ++j) out *= inverse(v.a(j));
  return out.prune();
}

double laplace_exponent(const ScaleParams& p, const Eigen::VectorXd& beta, const Eigen::VectorXd& theta) {
  const auto n = beta.size();
  const Eigen::ArrayXd a = p.a.head(n).array(), b = p.b.head(n).array();
  return ((a * a + b * b - 1.0) * beta.array()).sum() + (b * theta.array()).sum();
}

double radon_nikodym(const Graph& g, const ScaleParams& p, const FieldConfig& cfg) {
  validate(g, cfg);
  const Eigen::VectorXd beta = compute_beta(g, cfg.u);
  const Eigen::VectorXd theta = compute_theta(g, cfg.u, cfg.s);
  return std::exp(-laplace_log(g, p) - laplace_exponent(p, beta, theta));
}

double density_ratio(const Graph& g, const ScaleParams& p, const FieldConfig& cfg) {
  const Graph ga = rescale_weights(p, g);
  const FieldConfig pre = scale_fields(p, cfg, ScaleDirection::inverse);
  const double num = rho_density(ga, pre, RhoMode::direct).log_value;
  const double den = rho_density(g, cfg, RhoMode::direct).log_value;
  return std::exp(num - den + p.a.head(idx(g.n())).array().log().sum());
}

Eigen::MatrixXd theta_conditional_covariance(const Graph& g, const Eigen::VectorXd& u) {
  const auto n = idx(g.n());
  if (u.size() != idx(g.size()) || u(idx(g.pinned_index())) != 0.0) {
    throw InvariantViolation("u must cover all vertices with a zero pinned entry");
  }
  const Eigen::MatrixXd A = build_A(g, u);
  const Eigen::VectorXd emu = (-u.head(n).array()).exp();
  return emu.asDiagonal() * A.topLeftCorner(n, n) * emu.asDiagonal();
}

}  // namespace hsigma

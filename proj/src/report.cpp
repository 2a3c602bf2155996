#include "hsigma/report.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

namespace hsigma {

namespace {

double floor_se(double se) { return std::max(se, kStderrFloor); }

}  // namespace

std::vector<std::string> subset_names(const AlgebraPtr& algebra, Mask mask) {
  std::vector<std::string> out;
  if (!algebra) return out;
  for (std::size_t k = 0; k < algebra->size(); ++k)
    if (mask & (Mask{1} << k)) out.push_back(algebra->names()[k]);
  return out;
}

double bonferroni_threshold(double z, std::size_t m) {
  if (m <= 1 || !(z > 0.0)) return z;
  const boost::math::normal n;
  const double tail = boost::math::cdf(boost::math::complement(n, z));  // one-sided
  return boost::math::quantile(boost::math::complement(n, tail / static_cast<double>(m)));
}

ReportBuilder::ReportBuilder(std::string check, std::uint64_t seed) {
  r_.check = std::move(check);
  r_.seed = seed;
}

void ReportBuilder::statistical(std::string label, double estimate, double std_error, double reference,
                                std::vector<std::string> subset) {
  Coefficient c;
  c.subset = std::move(subset);
  c.label = std::move(label);
  c.kind = CoefficientKind::statistical;
  c.estimate = estimate;
  c.std_error = std_error;
  c.reference = reference;
  c.z = (estimate - reference) / floor_se(std_error);
  c.residual = std::abs(estimate - reference);
  r_.coefficients.push_back(std::move(c));
}

void ReportBuilder::two_sample(std::string label, double estimate, double std_error, double other,
                               double other_error, std::vector<std::string> subset) {
  statistical(std::move(label), estimate, std::hypot(std_error, other_error), other, std::move(subset));
}

void ReportBuilder::deterministic(std::string label, double estimate, double reference, double tolerance,
                                  std::vector<std::string> subset) {
  Coefficient c;
  c.subset = std::move(subset);
  c.label = std::move(label);
  c.kind = CoefficientKind::deterministic;
  c.estimate = estimate;
  c.reference = reference;
  c.residual = std::abs(estimate - reference);
  if (std::isnan(c.residual)) c.residual = std::numeric_limits<double>::infinity();
  c.tolerance = tolerance;
  r_.coefficients.push_back(std::move(c));
}

void ReportBuilder::relative(std::string label, double estimate, double reference, double tolerance,
                             std::vector<std::string> subset) {
  deterministic(std::move(label), estimate, reference, tolerance, std::move(subset));
  Coefficient& c = r_.coefficients.back();
  c.residual /= std::max(1.0, std::abs(reference));
  if (std::isnan(c.residual)) c.residual = std::numeric_limits<double>::infinity();
}

void ReportBuilder::grassmann(const std::string& label, const SuperEstimate& est,
                              const ComplexGrassmann& reference) {
  for (Mask m : est.masks) {
    const std::complex<double> e = est.coeff(m), se = est.std_error(m), ref = reference.coeff(m);
    const auto names = subset_names(est.params, m);
    // A real part with no sampling spread is a per-sample constant; compare it exactly.
    // Odd monomials vanish by parity and stay unreported.
    if (se.real() == 0.0 && std::popcount(m) % 2 == 0) {
      deterministic(label + " re (exact)", e.real(), ref.real(), 1e-12 * std::max(1.0, std::abs(ref.real())), names);
    } else if (e.real() != 0.0 || se.real() != 0.0 || ref.real() != 0.0) {
      statistical(label + " re", e.real(), se.real(), ref.real(), names);
    }
    if (e.imag() != 0.0 || se.imag() != 0.0 || ref.imag() != 0.0)
      statistical(label + " im", e.imag(), se.imag(), ref.imag(), names);
  }
}

void ReportBuilder::grassmann_two_sample(const std::string& label, const SuperEstimate& lhs,
                                         const SuperEstimate& rhs) {
  for (Mask m : lhs.masks) {
    const std::complex<double> a = lhs.coeff(m), sa = lhs.std_error(m), b = rhs.coeff(m), sb = rhs.std_error(m);
    const auto names = subset_names(lhs.params, m);
    if (a.real() != 0.0 || b.real() != 0.0 || sa.real() != 0.0 || sb.real() != 0.0)
      two_sample(label + " re", a.real(), sa.real(), b.real(), sb.real(), names);
    if (a.imag() != 0.0 || b.imag() != 0.0 || sa.imag() != 0.0 || sb.imag() != 0.0)
      two_sample(label + " im", a.imag(), sa.imag(), b.imag(), sb.imag(), names);
  }
}

void ReportBuilder::grassmann_exact(const std::string& label, const ComplexGrassmann& value,
                                    const ComplexGrassmann& reference, double tolerance) {
  const AlgebraPtr alg = value.algebra() ? value.algebra() : reference.algebra();
  std::vector<Mask> masks;
  for (const auto& t : value.terms()) masks.push_back(t.first);
  for (const auto& t : reference.terms()) masks.push_back(t.first);
  if (masks.empty()) masks.push_back(0);
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  for (Mask m : masks) {
    const std::complex<double> v = value.coeff(m), r = reference.coeff(m);
    const auto names = subset_names(alg, m);
    deterministic(label + " re", v.real(), r.real(), tolerance, names);
    if (v.imag() != 0.0 || r.imag() != 0.0) deterministic(label + " im", v.imag(), r.imag(), tolerance, names);
  }
}

void ReportBuilder::note(std::string text) { r_.notes.push_back(std::move(text)); }

void ReportBuilder::trace(std::string label, const Estimate& est) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  r_.traces.push_back({std::move(label), est.seed, est.n_samples, est.acceptance, vec(est.mean), vec(est.std_error),
                       vec(est.n_effective), vec(est.rhat)});
}

double Trace::max_rhat() const {
  double m = 1.0;
  for (double r : rhat) m = std::max(m, r);
  return m;
}

Report ReportBuilder::finish(const Policy& policy, double default_z) && {
  const double z = policy.z_threshold.value_or(default_z);
  std::size_t m = 0;
  for (const auto& c : r_.coefficients) m += c.kind == CoefficientKind::statistical ? 1 : 0;
  r_.z_threshold = policy.bonferroni ? bonferroni_threshold(z, m) : z;
  bool pass = z > 0.0 && std::isfinite(z);
  if (policy.tolerance && !(*policy.tolerance > 0.0)) pass = false;
  if (!pass) r_.notes.push_back("degenerate policy: thresholds must be positive");
  for (auto& c : r_.coefficients) {
    if (c.kind == CoefficientKind::statistical) {
      if (!(std::abs(c.z) <= r_.z_threshold)) pass = false;
    } else {
      if (policy.tolerance) c.tolerance = *policy.tolerance;
      if (!(c.residual <= c.tolerance)) pass = false;
    }
  }
  r_.pass = pass && !r_.coefficients.empty();
  return std::move(r_);
}

}  // namespace hsigma

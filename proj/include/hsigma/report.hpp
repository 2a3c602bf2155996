#ifndef HSIGMA_REPORT_HPP
#define HSIGMA_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsigma/sampler.hpp"

namespace hsigma {

enum class CoefficientKind { statistical, deterministic };

/// One compared quantity. Statistical entries carry z = (estimate - reference) / stderr;
/// deterministic entries carry residual = |estimate - reference| against `tolerance`.
struct Coefficient {
  std::vector<std::string> subset;  ///< parameter generators of the monomial; empty for scalars
  std::string label;
  CoefficientKind kind = CoefficientKind::statistical;
  double estimate = 0.0;
  double std_error = 0.0;
  double reference = 0.0;
  double z = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
};

/// Chain diagnostics of one estimator run.
struct Trace {
  std::string label;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  double acceptance = 0.0;
  std::vector<double> mean, std_error, n_effective, rhat;

  double max_rhat() const;
};

struct Policy {
  std::optional<double> z_threshold;  ///< unset: the check's own default
  std::optional<double> tolerance;    ///< unset: per-coefficient tolerances
  bool bonferroni = false;            ///< spread the per-check false-failure budget over its coefficients
};

struct Report {
  std::string check;
  bool pass = false;
  std::uint64_t seed = 0;
  std::vector<Coefficient> coefficients;
  double runtime_s = 0.0;
  double z_threshold = 3.0;  ///< effective per-coefficient threshold after finalize
  std::vector<std::string> notes;
  std::vector<Trace> traces;
};

/// Smallest stderr used in z-scores; exact observables have zero variance.
inline constexpr double kStderrFloor = 1e-12;

/// Collects coefficients for one check.
class ReportBuilder {
 public:
  explicit ReportBuilder(std::string check, std::uint64_t seed = 0);

  void statistical(std::string label, double estimate, double std_error, double reference,
                   std::vector<std::string> subset = {});
  /// Two independent estimates: reference = `other`, stderr combined in quadrature.
  void two_sample(std::string label, double estimate, double std_error, double other, double other_error,
                  std::vector<std::string> subset = {});
  /// Residual is |estimate - reference|.
  void deterministic(std::string label, double estimate, double reference, double tolerance,
                     std::vector<std::string> subset = {});
  /// Residual is |estimate - reference| / max(1, |reference|).
  void relative(std::string label, double estimate, double reference, double tolerance,
                std::vector<std::string> subset = {});
  /// Every coefficient of an estimated Grassmann element (real and imaginary parts) against a reference.
  /// Even real parts with zero standard error are compared exactly, so pointwise cancellations show up.
  void grassmann(const std::string& label, const SuperEstimate& est, const ComplexGrassmann& reference);
  /// Every coefficient of two independent Grassmann estimates.
  void grassmann_two_sample(const std::string& label, const SuperEstimate& lhs, const SuperEstimate& rhs);
  /// Deterministic comparison of two Grassmann elements over the same algebra.
  void grassmann_exact(const std::string& label, const ComplexGrassmann& value, const ComplexGrassmann& reference,
                       double tolerance);
  void note(std::string text);
  void trace(std::string label, const Estimate& est);

  /// Sets thresholds and the verdict. A nonpositive z threshold or tolerance fails the check.
  Report finish(const Policy& policy, double default_z = 3.0) &&;

 private:
  Report r_;
};

/// Per-coefficient threshold keeping the family-wise false-failure rate of `m` coefficients
/// at the two-sided rate of a single `z` test.
double bonferroni_threshold(double z, std::size_t m);

/// Generator names present in `mask`, ascending.
std::vector<std::string> subset_names(const AlgebraPtr& algebra, Mask mask);

}  // namespace hsigma

#endif  // HSIGMA_REPORT_HPP

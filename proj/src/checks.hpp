#ifndef HSIGMA_SRC_CHECKS_HPP
#define HSIGMA_SRC_CHECKS_HPP

// Check bodies behind the verify registry. Each appends coefficients to a ReportBuilder.

#include <string>

#include "hsigma/graph.hpp"
#include "hsigma/quadrature.hpp"
#include "hsigma/report.hpp"
#include "hsigma/rng.hpp"
#include "hsigma/sampler.hpp"
#include "hsigma/scaling.hpp"
#include "hsigma/verify.hpp"

namespace hsigma::detail {

struct CheckEnv {
  const CheckSpec& spec;

  /// Default chain settings with the CheckSpec overrides; salt 0 keeps CheckSpec::seed.
  ChainConfig chain(std::size_t default_samples, std::uint64_t salt = 0) const;
  bool custom_graph() const { return spec.graph_path.has_value(); }
  bool custom_tower() const { return spec.tower_path.has_value(); }
  /// spec.graph_path, else fixtures/<name>.json.
  Graph graph(const std::string& name) const;
  GraphTower tower(const std::string& name) const;
  /// Independent stream for the check's own randomness (random inputs, bump centers).
  Philox rng(std::uint64_t stream) const { return Philox(spec.seed, 0x1000 + stream); }
};

using CheckFn = void (*)(ReportBuilder&, const CheckEnv&);

// Deterministic checks.
void check_rho_equivalence(ReportBuilder& rb, const CheckEnv& env);
void check_spinor_identity(ReportBuilder& rb, const CheckEnv& env);
void check_A_scale_invariance(ReportBuilder& rb, const CheckEnv& env);
void check_zeta_scaling(ReportBuilder& rb, const CheckEnv& env);
void check_marginal_lemma(ReportBuilder& rb, const CheckEnv& env);
void check_jacobian_sdet(ReportBuilder& rb, const CheckEnv& env);
void check_cartesian_horospherical(ReportBuilder& rb, const CheckEnv& env);

// Monte-Carlo checks.
void check_theta_conditional(ReportBuilder& rb, const CheckEnv& env);
void check_radon_nikodym(ReportBuilder& rb, const CheckEnv& env);
void check_laplace_real(ReportBuilder& rb, const CheckEnv& env);
void check_laplace_grassmann(ReportBuilder& rb, const CheckEnv& env);
void check_consistency(ReportBuilder& rb, const CheckEnv& env);
void check_martingale_generating(ReportBuilder& rb, const CheckEnv& env);
void check_martingale_derivatives(ReportBuilder& rb, const CheckEnv& env);
void check_martingale_special_cases(ReportBuilder& rb, const CheckEnv& env);
void check_ward(ReportBuilder& rb, const CheckEnv& env);
void check_image_measure_super(ReportBuilder& rb, const CheckEnv& env);

// Shared helpers.

double uniform(Philox& rng, double lo, double hi);
/// Connected graph on free vertices "1".."n" plus "delta": a random spanning tree plus
/// extra edges with probability 0.4, weights in [0.2, 2].
Graph random_graph(Philox& rng, std::size_t n);
/// u, s uniform in [lo, hi] on V, zero at the pinned vertex.
FieldConfig random_config(Philox& rng, const Graph& g, double lo, double hi);

/// Components [E e^{-<a^2+b^2-1, beta> - <b, theta>}, E 1] under mu^W for |V| = 1,
/// by quadrature over (u, t) with s = t / sqrt(A_11).
QuadratureResult laplace_quadrature(const Graph& g, double a, double b);

}  // namespace hsigma::detail

#endif  // HSIGMA_SRC_CHECKS_HPP

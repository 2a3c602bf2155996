#ifndef HSIGMA_SAMPLER_HPP
#define HSIGMA_SAMPLER_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hsigma/grassmann.hpp"
#include "hsigma/graph.hpp"
#include "hsigma/rng.hpp"

namespace hsigma {

struct ChainConfig {
  std::size_t n_samples = 100000;  ///< retained samples summed over chains, rounded up to equal batches
  std::size_t burn_in = 2000;      ///< sweeps per chain before retention; tuning happens here
  std::size_t thinning = 1;        ///< sweeps between retained samples
  std::size_t n_chains = 4;
  double proposal_scale = 1.0;  ///< initial per-site random-walk scale
  std::uint64_t seed = 1;
};

/// Throws DomainError on zero counts or a nonpositive proposal scale.
void validate(const ChainConfig& cc);

/// One retained draw. `A` is the full matrix A(u); `s` was drawn exactly given u.
struct SampleView {
  const Graph& graph;
  const Eigen::VectorXd& u;
  const Eigen::VectorXd& s;
  const Eigen::MatrixXd& A;
  double log_det;  ///< log det A_VV(u)
};

using VectorObservable = std::function<void(const SampleView&, double* out)>;

struct Estimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;
  Eigen::VectorXd n_effective;
  Eigen::VectorXd rhat;  ///< Gelman-Rubin per component; 1 when undefined or the component is constant
  double acceptance = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  double max_rhat() const;
};

/// Log of the u-marginal density up to a constant:
/// 1/2 log det A_VV - sum_edges W (cosh(u_i - u_j) - 1) - sum_V u_i.
double log_u_marginal(const Graph& g, const Eigen::VectorXd& u);

/// s_V = L^{-T} z for A_VV = L L^T and standard normal z; s_pinned = 0.
Eigen::VectorXd sample_s_given_u(const Graph& g, const Eigen::VectorXd& u, Philox& rng);

/// Runs all chains and averages a vector observable of dimension `dim`.
/// Throws EstimationFailure on non-finite observable values.
Estimate expect(const Graph& g, const VectorObservable& f, std::size_t dim, const ChainConfig& cc);
Estimate expect(const Graph& g, const std::function<double(const SampleView&)>& f, const ChainConfig& cc);
/// Components 0 and 1 hold the real and imaginary parts.
Estimate expect_complex(const Graph& g, const std::function<std::complex<double>(const SampleView&)>& f,
                        const ChainConfig& cc);

/// Calls `sink(chain, view)` for each retained draw, chains in order.
void for_each_sample(const Graph& g, const ChainConfig& cc,
                     const std::function<void(std::size_t, const SampleView&)>& sink);

/// Layout of the combined algebra used by superexpectations: psibar_i, psi_i
/// for each free vertex, then the parameter generators.
struct SuperContext {
  AlgebraPtr algebra;
  AlgebraPtr params;
  std::size_t n_vertices = 0;

  SuperContext(const Graph& g, const AlgebraPtr& params);

  ComplexGrassmann psibar(std::size_t i) const;
  ComplexGrassmann psi(std::size_t i) const;
  /// Parameter-algebra element re-expressed in the combined algebra.
  ComplexGrassmann lift(const GrassmannElement& x) const;
  ComplexGrassmann lift(const ComplexGrassmann& x) const;
  GrassmannElement lift_real(const GrassmannElement& x) const;
  /// (psibar_i, psi_i) generator index pairs for the Berezin integral.
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
  /// Parameter-algebra element from a combined element free of field generators.
  ComplexGrassmann project(const ComplexGrassmann& x) const;
  /// exp(-<psibar, A psi>) over the free block of A.
  ComplexGrassmann gaussian_weight(const Eigen::MatrixXd& A) const;
  ComplexGrassmann gaussian_weight(const GMatrix& A) const;
};

/// Returns h(u, s) = exp(-<psibar, A psi>) f as an element of the combined algebra.
using SuperIntegrand = std::function<ComplexGrassmann(const SampleView&, const SuperContext&)>;

struct SuperEstimate {
  AlgebraPtr params;
  std::vector<Mask> masks;  ///< every parameter monomial, ascending
  Estimate raw;             ///< components 2k and 2k+1: real and imaginary part of masks[k]

  ComplexGrassmann mean() const;
  std::complex<double> coeff(Mask m) const;
  std::complex<double> std_error(Mask m) const;
};

/// Average of [prod_i d_psibar_i d_psi_i h] / det A_VV over (u, s) ~ mu^W.
SuperEstimate super_expect(const Graph& g, const SuperIntegrand& h, const AlgebraPtr& params,
                           const ChainConfig& cc);

/// Per-sample Berezin reduction used by super_expect.
ComplexGrassmann berezin_reduce(const SuperContext& ctx, const ComplexGrassmann& h, double log_det);

}  // namespace hsigma

#endif  // HSIGMA_SAMPLER_HPP

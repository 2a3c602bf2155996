#ifndef HSIGMA_SUPERSYM_HPP
#define HSIGMA_SUPERSYM_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsigma/grassmann.hpp"
#include "hsigma/graph.hpp"
#include "hsigma/report.hpp"
#include "hsigma/sampler.hpp"
#include "hsigma/sigma_core.hpp"

namespace hsigma {

/// Coordinates (u, s, psibar, psi) over V as elements of one algebra; u and s even,
/// psibar and psi odd.
struct SuperPoint {
  std::vector<GrassmannElement> u, s, psibar, psi;
};

enum class Parity { even, odd };

struct SuperObservable {
  std::function<ComplexGrassmann(const SuperPoint&)> eval;
  Parity parity = Parity::even;
};

/// The sample's (u, s) as scalars and the context's field generators.
SuperPoint sample_point(const SuperContext& ctx, const SampleView& view);

enum class PhiKind { phi, phibar };

/// phi = e^{-u} A_VV psi (phibar likewise from psibar), over `algebra`, which must
/// contain the generators psi_<label> and psibar_<label> for every free vertex.
std::vector<GrassmannElement> compute_phi(const Graph& g, const Eigen::VectorXd& u, PhiKind kind,
                                          const AlgebraPtr& algebra);
/// phi_i = sum_j W_ij e^{u_j} (psi_i - psi_j) with psi_pinned = 0.
std::vector<GrassmannElement> compute_phi_componentwise(const Graph& g, const Eigen::VectorXd& u, PhiKind kind,
                                                        const AlgebraPtr& algebra);

/// e^{-<s,As>/2} e^{-<psibar,A psi>} prod_edges e^{-W[cosh(u_i-u_j)-1]} over a field algebra.
GrassmannElement bold_rho(const Graph& g, const FieldConfig& cfg, const AlgebraPtr& algebra);

/// A(u) for even weights W and even u over all vertices.
GMatrix build_A(const GMatrix& W, const std::vector<GrassmannElement>& u);

/// (S*_v f)(x) = f(x . v^{-1}): u + log a, s - e^{-u} b a^{-1}, psibar - e^{-u} chibar a^{-1},
/// psi - e^{-u} chi a^{-1}. `v` lives over ctx.params; as operators
/// S*_v S*_w = S*_{w v}.
SuperObservable super_scale_pullback(const GroupElement& v, const SuperObservable& f, const SuperContext& ctx);

/// d(u', s', psibar', psi') / d(u, s, psibar, psi) with even order (u_1, s_1, ...) and odd
/// order (psibar_1, psi_1, ...); `u` covers V.
SuperMatrix super_jacobian(const GroupElement& v, const Eigen::VectorXd& u);

/// <pi, varpi> = <a^2 + b^2 + 2 chibar chi - 1, beta> + <b, theta> + <chibar, phi> + <phibar, chi>
/// for one sample, in the combined algebra of `ctx`.
ComplexGrassmann laplace_pairing(const SuperContext& ctx, const GroupElement& v, const SampleView& view);

/// Density of mu^{W'} relative to mu^{W0} apart from det A^{W0}_VV, for even W' with
/// body(W') = W0: e^{-<psibar, A^{W'} psi>} e^{-<s,(A^{W'}-A^{W0}) s>/2} prod e^{-(W'-W0)(cosh-1)}.
ComplexGrassmann reweighted_gaussian(const SuperContext& ctx, const GMatrix& w_prime, const SampleView& view);

/// Superexpectation under mu^{W'} for Grassmann weights, sampled from mu^{body(W')}.
/// `f` is the observable without the Gaussian factor.
SuperEstimate super_expect_weighted(const Graph& body, const GMatrix& w_prime,
                                    const std::function<ComplexGrassmann(const SampleView&, const SuperContext&)>& f,
                                    const AlgebraPtr& params, const ChainConfig& cc);

/// Group element over all vertices of `g` from per-free-vertex entries; pinned entry identity.
GroupElement extend_group(const Graph& g, const std::vector<GrassmannElement>& a,
                          const std::vector<GrassmannElement>& b, const std::vector<GrassmannElement>& chibar,
                          const std::vector<GrassmannElement>& chi, const AlgebraPtr& params);

// The checks below append coefficients to `rb`; every label starts with `label`.

/// Closed form of the Grassmann Laplace transform against super_expect of e^{-<pi, varpi>}.
void grassmann_laplace_check(ReportBuilder& rb, const std::string& label, const Graph& g, const GroupElement& v,
                             const ChainConfig& cc);

/// int dmu^W f e^{-<pi,varpi>} against L(v) int dmu^{W^a} S*_v f, two independent runs.
void super_image_measure_check(ReportBuilder& rb, const std::string& label, const Graph& g, const GroupElement& v,
                               const SuperObservable& f, const ChainConfig& cc);

/// E[e^{<alpha, e^u(1+is)> + <tau, e^u(psibar + i psi)>}] against e^{<alpha, 1>}; `tau` over V is odd
/// over `params`.
void ward_check(ReportBuilder& rb, const std::string& label, const Graph& g, const Eigen::VectorXd& alpha,
                const std::vector<GrassmannElement>& tau, const AlgebraPtr& params, const ChainConfig& cc);

/// Parameters of the generating martingale and its test function on V_n.
struct MartingaleSpec {
  std::map<std::string, double> alpha;               ///< nonpositive, over the universe
  std::map<std::string, GrassmannElement> tau;       ///< odd, over V_n
  std::map<std::string, GrassmannElement> a, b;      ///< even tilt parameters over V_n; default [1, 0]
  std::map<std::string, GrassmannElement> chibar, chi;
  AlgebraPtr params;
};

/// Level n and n+1 estimates of M_{alpha,tau} e^{-<pi,varpi>} against each other and against
/// L e^{<alpha, a - ib> - <tau, chibar + i chi>}.
void susy_martingale_check(ReportBuilder& rb, const std::string& label, const GraphTower& tower, std::size_t n,
                           const MartingaleSpec& spec, const ChainConfig& cc);

/// Closed forms at levels n and n+1 (real and Grassmann) and moments of (beta, theta) on V_n.
void consistency_check(ReportBuilder& rb, const std::string& label, const GraphTower& tower, std::size_t n,
                       const MartingaleSpec& params, const ChainConfig& cc);

/// Group element over all vertices of wired_subgraph(tower, k) from label-keyed entries of `spec`.
GroupElement level_group(const GraphTower& tower, std::size_t k, const MartingaleSpec& spec);

}  // namespace hsigma

#endif  // HSIGMA_SUPERSYM_HPP

#ifndef HSIGMA_SCALING_HPP
#define HSIGMA_SCALING_HPP

#include <Eigen/Dense>

#include "hsigma/grassmann.hpp"
#include "hsigma/graph.hpp"
#include "hsigma/sigma_core.hpp"

namespace hsigma {

/// Real per-vertex group element [a_i, b_i] over all vertices; pinned entry [1, 0].
struct ScaleParams {
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  static ScaleParams identity(const Graph& g);
  /// Appends the pinned [1, 0] to vectors over V.
  static ScaleParams from_free(const Eigen::VectorXd& a_v, const Eigen::VectorXd& b_v);

  GroupElement to_group() const;
};

/// Throws DomainError unless sizes match, a > 0 and the pinned entry is [1, 0].
void validate(const Graph& g, const ScaleParams& p);

/// Matrix product [a, b][a', b'] = [a a', a b' + b].
ScaleParams compose(const ScaleParams& p, const ScaleParams& q);
ScaleParams inverse(const ScaleParams& p);

enum class ScaleDirection { forward, inverse };

/// forward: (u + log a, s - e^{-u} b / a); inverse: (u - log a, s + e^{-u} b).
/// scale_fields(p, scale_fields(q, cfg)) = scale_fields(compose(p, q), cfg).
FieldConfig scale_fields(const ScaleParams& p, const FieldConfig& cfg,
                         ScaleDirection dir = ScaleDirection::forward);

/// W^a_ij = a_i a_j W_ij.
Graph rescale_weights(const ScaleParams& p, const Graph& g);
/// Grassmann-valued W^a for even a with positive body (pinned a = 1).
GMatrix rescale_weights(const std::vector<GrassmannElement>& a, const Graph& g);

/// log of prod_edges e^{-W(a_i a_j + b_i b_j - 1)} prod_V 1/a_j.
double laplace_log(const Graph& g, const ScaleParams& p);
double laplace_closed_form(const Graph& g, const ScaleParams& p);
/// Grassmann version with chibar, chi: the edge exponent gains chibar_i chi_j + chibar_j chi_i.
GrassmannElement laplace_closed_form(const Graph& g, const GroupElement& v);

/// <a^2 + b^2 - 1, beta> + <b, theta> over V.
double laplace_exponent(const ScaleParams& p, const Eigen::VectorXd& beta, const Eigen::VectorXd& theta);

/// d(S mu^{W^a}) / d mu^W at (u, s).
double radon_nikodym(const Graph& g, const ScaleParams& p, const FieldConfig& cfg);
/// Same density from rho^{W^a}(S^{-1}(u, s)) prod a / rho^W(u, s), in the log domain.
double density_ratio(const Graph& g, const ScaleParams& p, const FieldConfig& cfg);

/// Covariance of theta given u: e^{-u} A_VV e^{-u}.
Eigen::MatrixXd theta_conditional_covariance(const Graph& g, const Eigen::VectorXd& u);

}  // namespace hsigma

#endif  // HSIGMA_SCALING_HPP

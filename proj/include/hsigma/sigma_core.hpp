#ifndef HSIGMA_SIGMA_CORE_HPP
#define HSIGMA_SIGMA_CORE_HPP

#include <vector>

#include <Eigen/Dense>

#include "hsigma/grassmann.hpp"
#include "hsigma/graph.hpp"

namespace hsigma {

/// Point (u, s) over all vertices; the pinned entries are zero.
struct FieldConfig {
  Eigen::VectorXd u;
  Eigen::VectorXd s;

  /// Zero configuration for `g`.
  static FieldConfig zero(const Graph& g);
  /// Appends the pinned zero to vectors over V.
  static FieldConfig from_free(const Eigen::VectorXd& u_v, const Eigen::VectorXd& s_v);
};

/// Throws InvariantViolation unless sizes match and pinned entries vanish.
void validate(const Graph& g, const FieldConfig& cfg);

/// Off-diagonal -W_ij e^{u_i+u_j}; rows sum to zero.
Eigen::MatrixXd build_A(const Graph& g, const Eigen::VectorXd& u);

/// beta_i = 1/2 sum_j W_ij e^{u_j - u_i} for i in V.
Eigen::VectorXd compute_beta(const Graph& g, const Eigen::VectorXd& u);
/// Same sum over every vertex, including the pinned one.
Eigen::VectorXd compute_beta_tilde(const Graph& g, const Eigen::VectorXd& u);

/// theta = e^{-u} A_VV s_V.
Eigen::VectorXd compute_theta(const Graph& g, const Eigen::VectorXd& u, const Eigen::VectorXd& s);
/// theta_i = sum_j W_ij e^{u_j} (s_i - s_j).
Eigen::VectorXd compute_theta_componentwise(const Graph& g, const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& s);

/// H_ij = 2 beta~_i delta_ij - W_ij over all vertices.
Eigen::MatrixXd h_beta(const Graph& g, const Eigen::VectorXd& u);

/// log det A_VV via Cholesky; throws PositiveDefinitenessError.
double log_det_AVV(const Eigen::MatrixXd& A, std::size_t n);

enum class RhoMode { direct, quadratic, spinor };

struct RhoValue {
  double value;
  double log_value;
  bool underflow;
};

RhoValue rho_density(const Graph& g, const FieldConfig& cfg, RhoMode mode);

/// det(v_i v_i^t / a_i - v_j v_j^t / a_j) for v = [[a, b], [0, 1]], evaluated from the matrices.
double spinor_det(double ai, double bi, double aj, double bj);
/// 2 - |v_i^t eps v_j|^2 / (a_i a_j) with eps = [[0, -1], [1, 0]].
double spinor_norm_form(double ai, double bi, double aj, double bj);

struct InversionOptions {
  int max_iterations = 100;
  double tolerance = 1e-10;
};

/// u with u_pinned = 0 and compute_beta(g, u) = beta. Throws InversionFailure.
Eigen::VectorXd u_from_beta(const Graph& g, const Eigen::VectorXd& beta,
                            const InversionOptions& opts = {});
/// s with s_pinned = 0 and compute_theta(g, u_from_beta(beta), s) = theta.
Eigen::VectorXd s_from_beta_theta(const Graph& g, const Eigen::VectorXd& beta,
                                  const Eigen::VectorXd& theta, const InversionOptions& opts = {});

/// Cartesian coordinates of a horospherical point; vectors cover all vertices.
struct CartesianPoint {
  std::vector<GrassmannElement> x, y, z, xi, eta;
};

/// `psibar` and `psi` are odd elements over V (empty means no Grassmann part).
CartesianPoint to_cartesian(const FieldConfig& cfg, const std::vector<GrassmannElement>& psibar = {},
                            const std::vector<GrassmannElement>& psi = {});

/// -sum_edges W_ij (-1 - x_i x_j - y_i y_j + z_i z_j - xi_i eta_j + eta_i xi_j).
GrassmannElement s_cart(const Graph& g, const CartesianPoint& p);

}  // namespace hsigma

#endif  // HSIGMA_SIGMA_CORE_HPP

#ifndef HSIGMA_QUADRATURE_HPP
#define HSIGMA_QUADRATURE_HPP

#include <functional>
#include <utility>

#include <Eigen/Dense>

namespace hsigma {

struct QuadratureResult {
  Eigen::VectorXd value;
  double error = 0.0;  ///< Kronrod error estimate, max norm
  bool converged = false;
};

using QuadFn = std::function<Eigen::VectorXd(double)>;
using QuadFn2 = std::function<Eigen::VectorXd(double, double)>;

/// Globally adaptive Gauss-Kronrod (7/15) for vector-valued integrands on [a, b].
/// Stops once the summed error is below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const QuadFn& f, double a, double b, double abs_tol, double rel_tol,
                           std::size_t max_intervals = 4000);

/// Nested rule: integral over x in [xa, xb] of the integral over y in y_range(x).
/// The inner tolerance is a tenth of the outer one.
QuadratureResult integrate_2d(const QuadFn2& f, double xa, double xb,
                              const std::function<std::pair<double, double>(double)>& y_range,
                              double abs_tol, double rel_tol);

}  // namespace hsigma

#endif  // HSIGMA_QUADRATURE_HPP

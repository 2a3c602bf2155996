#include "hsigma/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace hsigma {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are the Gauss-7 nodes.
constexpr std::array<double, 8> kX = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWK = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWG = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  Eigen::VectorXd value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment rule(const QuadFn& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Eigen::VectorXd fc = f(c);
  Eigen::VectorXd k = kWK[7] * fc;
  Eigen::VectorXd g = kWG[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const Eigen::VectorXd s = f(c - h * kX[i]) + f(c + h * kX[i]);
    k += kWK[i] * s;
    if (i % 2 == 1) g += kWG[i / 2] * s;
  }
  k *= h;
  g *= h;
  return {a, b, k, (k - g).cwiseAbs().maxCoeff()};
}

}  // namespace

QuadratureResult integrate(const QuadFn& f, double a, double b, double abs_tol, double rel_tol,
                           std::size_t max_intervals) {
  std::priority_queue<Segment> heap;
  Segment first = rule(f, a, b);
  Eigen::VectorXd total = first.value;
  double err = first.error;
  heap.push(std::move(first));
  while (heap.size() < max_intervals) {
    const double target = std::max(abs_tol, rel_tol * total.cwiseAbs().maxCoeff());
    if (err <= target) break;
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = rule(f, worst.a, mid), right = rule(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
  }
  // Re-sum to shed the drift of the running updates.
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(total.size());
  double e = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  const double target = std::max(abs_tol, rel_tol * sum.cwiseAbs().maxCoeff());
  return {sum, e, e <= target};
}

QuadratureResult integrate_2d(const QuadFn2& f, double xa, double xb,
                              const std::function<std::pair<double, double>(double)>& y_range,
                              double abs_tol, double rel_tol) {
  bool inner_ok = true;
  double inner_err = 0.0;
  const QuadratureResult outer = integrate(
      [&](double x) {
        const auto [ya, yb] = y_range(x);
        const QuadratureResult r =
            integrate([&](double y) { return f(x, y); }, ya, yb, 0.1 * abs_tol, 0.1 * rel_tol);
        inner_ok = inner_ok && r.converged;
        inner_err = std::max(inner_err, r.error);
        return r.value;
      },
      xa, xb, abs_tol, rel_tol);
  return {outer.value, outer.error + inner_err * (xb - xa), outer.converged && inner_ok};
}

}  // namespace hsigma

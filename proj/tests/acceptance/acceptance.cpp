// Acceptance run: one PASS/FAIL line per criterion. A criterion passes when its checks pass at
// their default sample sizes, every Monte-Carlo trace has R-hat <= 1.05, and the wall-clock
// budget holds. Each check keeps the false-failure rate of one 3 sigma test, split over its
// statistical coefficients (Bonferroni); the line also counts coefficients beyond a raw 3 sigma.
// Usage: hsigma_acceptance [base_seed]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "hsigma/errors.hpp"
#include "hsigma/graph.hpp"
#include "hsigma/rng.hpp"
#include "hsigma/sigma_core.hpp"
#include "hsigma/verify.hpp"

namespace {

using namespace hsigma;

constexpr double kMaxRhat = 1.05;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int number;
  std::string name;
  double budget_s;
  std::function<Outcome(std::uint64_t)> run;
};

// Runs the listed checks the way the suite would and folds them into one outcome.
Outcome run_checks(const std::vector<std::string>& ids, std::uint64_t base) {
  Outcome out;
  double worst_z = 0.0, worst_ratio = 0.0, worst_rhat = 1.0, min_threshold = 0.0;
  std::size_t n_coeff = 0, beyond_3 = 0;
  for (const auto& id : ids) {
    CheckSpec spec;
    spec.id = id;
    spec.seed = suite_seed(base, id);
    spec.policy.bonferroni = true;
    const Report r = run_check(spec);
    min_threshold = min_threshold == 0.0 ? r.z_threshold : std::min(min_threshold, r.z_threshold);
    if (!r.pass) {
      out.pass = false;
      out.detail += " [" + id + " failed]";
      for (const auto& n : r.notes) out.detail += " " + n;
    }
    for (const auto& c : r.coefficients) {
      ++n_coeff;
      if (c.kind == CoefficientKind::statistical) {
        worst_z = std::max(worst_z, std::abs(c.z));
        beyond_3 += std::abs(c.z) > 3.0 ? 1 : 0;
      } else if (c.tolerance > 0.0) {
        worst_ratio = std::max(worst_ratio, c.residual / c.tolerance);
      }
    }
    for (const auto& t : r.traces) {
      worst_rhat = std::max(worst_rhat, t.max_rhat());
      if (t.max_rhat() > kMaxRhat) {
        out.pass = false;
        out.detail += " [" + id + " " + t.label + " R-hat " + std::to_string(t.max_rhat()) + "]";
      }
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "coefficients %zu  max|z| %.2f (z threshold >= %.2f, %zu beyond 3)  max residual/tol %.3g  max R-hat %.4f",
                n_coeff, worst_z, min_threshold, beyond_3, worst_ratio, worst_rhat);
  out.detail = buf + out.detail;
  return out;
}

// Round trips through u_from_beta and s_from_beta_theta on every bundled graph fixture.
Outcome inversions(std::uint64_t base) {
  Outcome out;
  double worst = 0.0;
  std::size_t failures = 0, cases = 0;
  std::uint64_t stream = 0;
  for (const char* name : {"edge.json", "triangle.json", "star.json", "path.json"}) {
    const Graph g = load_graph(fixture_path(name));
    Philox rng(suite_seed(base, "inversions"), stream++);
    for (int t = 0; t < 100; ++t, ++cases) {
      Eigen::VectorXd u(g.n()), s(g.n());
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        u(i) = 4.0 * rng.uniform() - 2.0;
        s(i) = 4.0 * rng.uniform() - 2.0;
      }
      const FieldConfig cfg = FieldConfig::from_free(u, s);
      try {
        const Eigen::VectorXd beta = compute_beta(g, cfg.u), theta = compute_theta(g, cfg.u, cfg.s);
        const double du = (u_from_beta(g, beta) - cfg.u).cwiseAbs().maxCoeff();
        const double ds = (s_from_beta_theta(g, beta, theta) - cfg.s).cwiseAbs().maxCoeff();
        worst = std::max({worst, du, ds});
      } catch (const InversionFailure& e) {
        ++failures;
        out.detail += std::string(" [") + name + ": " + e.what() + "]";
      }
    }
  }
  out.pass = failures == 0 && worst <= 1e-8;
  char buf[128];
  std::snprintf(buf, sizeof buf, "configurations %zu  max residual %.3g (tol 1e-08)  failures %zu", cases, worst,
                failures);
  out.detail = buf + out.detail;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t base = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  auto checks = [](std::vector<std::string> ids) {
    return [ids](std::uint64_t b) { return run_checks(ids, b); };
  };
  const std::vector<Criterion> criteria{
      {1, "rho-equivalence", 1.0, checks({"rho-equivalence"})},
      {2, "spinor identity", 1.0, checks({"spinor-identity"})},
      {3, "real Laplace transform", 120.0, checks({"laplace-real"})},
      {4, "Radon-Nikodym identity", 180.0, checks({"radon-nikodym"})},
      {5, "consistency", 120.0, checks({"consistency"})},
      {6, "generating and derivative martingales", 300.0,
       checks({"martingale-generating", "martingale-derivatives", "martingale-special-cases"})},
      {7, "Ward identity", 60.0, checks({"ward"})},
      {8, "Grassmann sector exactness", 1.0, checks({"marginal-lemma", "jacobian-sdet"})},
      {9, "Grassmann-Laplace transform", 180.0, checks({"laplace-grassmann"})},
      {10, "conditional law of theta", 30.0, checks({"theta-conditional"})},
      {11, "inversions", 10.0, inversions},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(base);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %2d  %-40s %s  %.2f s (budget %.0f s)%s  %s\n", c.number, c.name.c_str(),
                pass ? "PASS" : "FAIL", secs, c.budget_s, in_time ? "" : " OVER BUDGET", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}

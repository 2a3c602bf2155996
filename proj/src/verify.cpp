#include "hsigma/verify.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "checks.hpp"

namespace hsigma {

namespace {

struct Entry {
  CheckInfo info;
  detail::CheckFn fn;
};

const std::vector<Entry>& entries() {
  using namespace detail;
  static const std::vector<Entry> table{
      {{"rho-equivalence", "three forms of the density agree on random graphs and fields", 3.0},
       check_rho_equivalence},
      {{"spinor-identity", "2x2 determinant form equals the norm form on random pairs", 3.0},
       check_spinor_identity},
      {{"A-scale-invariance", "A^{W^a}(u - log a) = A^W(u) for real and Grassmann a", 3.0},
       check_A_scale_invariance},
      {{"zeta-scaling", "reference measure picks up prod a under scaling (quadrature, |V| = 1)", 3.0},
       check_zeta_scaling},
      {{"radon-nikodym", "density ratio pointwise and the image-measure identity by MC", 3.0}, check_radon_nikodym},
      {{"laplace-real", "MC Laplace transform of (beta, theta) against the closed form", 3.0}, check_laplace_real},
      {{"laplace-grassmann", "Grassmann-Laplace transform coefficientwise against the closed form", 3.0},
       check_laplace_grassmann},
      {{"consistency", "closed forms and (beta, theta) moments agree across tower levels", 3.0}, check_consistency},
      {{"martingale-generating", "generating martingale at two levels against its closed form", 3.0},
       check_martingale_generating},
      {{"martingale-derivatives", "derivative martingales M_J with a tilt at two levels", 3.0},
       check_martingale_derivatives},
      {{"martingale-special-cases", "listed real martingales at two levels", 3.0}, check_martingale_special_cases},
      {{"ward", "E exp(<alpha, e^u(1+is)> + <tau, e^u(psibar + i psi)>) = e^{<alpha, 1>}", 3.0}, check_ward},
      {{"marginal-lemma", "Berezin integrals of Gaussians and of the superdensity", 3.0}, check_marginal_lemma},
      {{"jacobian-sdet", "superdeterminant of the scaling Jacobian and sdet multiplicativity", 3.0},
       check_jacobian_sdet},
      {{"theta-conditional", "theta given u is centred Gaussian with covariance H_beta", 5.0},
       check_theta_conditional},
      {{"cartesian-horospherical", "superintegrals agree in cartesian and horospherical charts", 3.0},
       check_cartesian_horospherical},
      {{"image-measure-super", "super image-measure identity with real and Grassmann a", 3.0},
       check_image_measure_super},
  };
  return table;
}

const Entry& find_entry(const std::string& id) {
  for (const auto& e : entries())
    if (e.info.id == id) return e;
  throw UnknownCheck("unknown check '" + id + "'");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Report error_report(const CheckSpec& spec, const std::string& what) {
  Report r;
  r.check = spec.id;
  r.seed = spec.seed;
  r.pass = false;
  r.z_threshold = spec.policy.z_threshold.value_or(3.0);
  r.notes.push_back("error: " + what);
  return r;
}

const char* kind_name(CoefficientKind k) { return k == CoefficientKind::statistical ? "statistical" : "deterministic"; }

nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["check"] = r.check;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["seed"] = r.seed;
  auto& coeffs = j["coefficients"] = nlohmann::json::array();
  for (const auto& c : r.coefficients) {
    nlohmann::json e;
    e["subset"] = c.subset;
    e["label"] = c.label;
    e["kind"] = kind_name(c.kind);
    e["estimate"] = c.estimate;
    e["stderr"] = c.std_error;
    e["reference"] = c.reference;
    e["z"] = c.z;
    e["residual"] = c.residual;
    e["tolerance"] = c.tolerance;
    coeffs.push_back(std::move(e));
  }
  j["runtime_s"] = r.runtime_s;
  j["z_threshold"] = r.z_threshold;
  j["notes"] = r.notes;
  if (!r.pass) {
    auto& tr = j["trace"] = nlohmann::json::array();
    for (const auto& t : r.traces) {
      tr.push_back({{"label", t.label},
                    {"seed", t.seed},
                    {"n_samples", t.n_samples},
                    {"acceptance", t.acceptance},
                    {"mean", t.mean},
                    {"stderr", t.std_error},
                    {"n_effective", t.n_effective},
                    {"rhat", t.rhat}});
    }
  }
  return j;
}

std::string num(double x, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

namespace detail {

ChainConfig CheckEnv::chain(std::size_t default_samples, std::uint64_t salt) const {
  ChainConfig cc;
  cc.n_samples = spec.chain.n_samples.value_or(default_samples);
  if (spec.chain.burn_in) cc.burn_in = *spec.chain.burn_in;
  if (spec.chain.thinning) cc.thinning = *spec.chain.thinning;
  if (spec.chain.n_chains) cc.n_chains = *spec.chain.n_chains;
  if (spec.chain.proposal_scale) cc.proposal_scale = *spec.chain.proposal_scale;
  cc.seed = salt == 0 ? spec.seed : mix_seed(spec.seed ^ (0x9E3779B97F4A7C15ull * salt));
  validate(cc);
  return cc;
}

Graph CheckEnv::graph(const std::string& name) const {
  return load_graph(spec.graph_path.value_or(fixture_path(name + ".json")));
}

GraphTower CheckEnv::tower(const std::string& name) const {
  return load_tower(spec.tower_path.value_or(fixture_path(name + ".json")));
}

}  // namespace detail

std::string fixture_path(const std::string& name) { return std::string(HSIGMA_FIXTURE_DIR) + "/" + name; }

const std::vector<CheckInfo>& registry() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const CheckInfo& find_check(const std::string& id) { return find_entry(id).info; }

Report run_check(const CheckSpec& spec) {
  const Entry& entry = find_entry(spec.id);
  const auto start = std::chrono::steady_clock::now();
  ReportBuilder rb(spec.id, spec.seed);
  Report r;
  try {
    entry.fn(rb, detail::CheckEnv{spec});
    r = std::move(rb).finish(spec.policy, entry.info.default_z);
  } catch (const FixtureError&) {
    throw;
  } catch (const Error& e) {
    r = error_report(spec, e.what());
  }
  if (spec.timing) r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::uint64_t suite_seed(std::uint64_t base, const std::string& id) { return mix_seed(base ^ fnv1a(id)); }

SuiteResult run_suite(const std::string& filter, std::size_t parallelism, const CheckSpec& base) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<CheckSpec> specs;
  for (const auto& info : registry()) {
    if (fnmatch(filter.c_str(), info.id.c_str(), 0) != 0) continue;
    CheckSpec s = base;
    s.id = info.id;
    s.seed = suite_seed(base.seed, info.id);
    specs.push_back(std::move(s));
  }
  SuiteResult out;
  out.reports.resize(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < specs.size(); k = next++) {
      try {
        out.reports[k] = run_check(specs[k]);
      } catch (const std::exception& e) {
        out.reports[k] = error_report(specs[k], e.what());
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(1, specs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& r : out.reports) (r.pass ? out.passed : out.failed) += 1;
  if (base.timing) out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string report_json(const Report& r, int indent) { return to_json(r).dump(indent); }

std::string suite_json(const SuiteResult& s, int indent) {
  nlohmann::json j;
  auto& reps = j["reports"] = nlohmann::json::array();
  for (const auto& r : s.reports) reps.push_back(to_json(r));
  j["summary"] = {{"checks", s.reports.size()},
                  {"passed", s.passed},
                  {"failed", s.failed},
                  {"runtime_s", s.runtime_s},
                  {"verdict", s.all_pass() ? "pass" : "fail"}};
  return j.dump(indent);
}

std::string report_table(const Report& r) {
  std::ostringstream os;
  os << r.check << ": " << (r.pass ? "PASS" : "FAIL") << "  seed " << r.seed << "  z threshold "
     << num(r.z_threshold, "%.4g");
  if (r.runtime_s > 0.0) os << "  runtime " << num(r.runtime_s, "%.3f") << " s";
  os << "\n";
  os << "  " << pad("coefficient", 58) << pad("estimate", 14) << pad("reference", 14) << pad("stderr", 12)
     << "z / residual\n";
  for (const auto& c : r.coefficients) {
    std::string label = c.label;
    if (!c.subset.empty()) {
      label += " [";
      for (std::size_t i = 0; i < c.subset.size(); ++i) label += (i ? " " : "") + c.subset[i];
      label += "]";
    }
    os << "  " << pad(label, 58) << pad(num(c.estimate), 14) << pad(num(c.reference), 14);
    if (c.kind == CoefficientKind::statistical) {
      os << pad(num(c.std_error, "%.3g"), 12) << num(c.z, "%+.3f");
    } else {
      os << pad("-", 12) << num(c.residual, "%.3g") << " (tol " << num(c.tolerance, "%.3g") << ")";
    }
    os << "\n";
  }
  for (const auto& n : r.notes) os << "  note: " << n << "\n";
  return os.str();
}

std::string suite_table(const SuiteResult& s) {
  std::ostringstream os;
  for (const auto& r : s.reports) {
    double worst_z = 0.0, worst_ratio = 0.0;
    for (const auto& c : r.coefficients) {
      if (c.kind == CoefficientKind::statistical) {
        worst_z = std::max(worst_z, std::abs(c.z));
      } else if (c.tolerance > 0.0) {
        worst_ratio = std::max(worst_ratio, c.residual / c.tolerance);
      }
    }
    os << pad(r.check, 28) << (r.pass ? "PASS" : "FAIL") << "  coefficients " << pad(std::to_string(r.coefficients.size()), 5)
       << " max|z| " << pad(num(worst_z, "%.3f"), 8) << " max residual/tol " << num(worst_ratio, "%.3g");
    if (r.runtime_s > 0.0) os << "  " << num(r.runtime_s, "%.2f") << " s";
    os << "\n";
  }
  os << "summary: " << s.passed << " passed, " << s.failed << " failed";
  if (s.runtime_s > 0.0) os << ", " << num(s.runtime_s, "%.2f") << " s";
  os << "\n";
  return os.str();
}

}  // namespace hsigma

#include <doctest.h>

#include <set>

#include <json.hpp>

#include "hsigma/errors.hpp"
#include "hsigma/verify.hpp"

using namespace hsigma;

namespace {

CheckSpec spec(const std::string& id, std::size_t samples = 0) {
  CheckSpec s;
  s.id = id;
  if (samples > 0) s.chain.n_samples = samples;
  return s;
}

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("registry lists the seventeen checks once each") {
    std::set<std::string> ids;
    for (const auto& c : registry()) ids.insert(c.id);
    CHECK(ids.size() == 17);
    CHECK(registry().size() == 17);
    for (const char* id : {"rho-equivalence", "spinor-identity", "A-scale-invariance", "zeta-scaling", "radon-nikodym",
                           "laplace-real", "laplace-grassmann", "consistency", "martingale-generating",
                           "martingale-derivatives", "martingale-special-cases", "ward", "marginal-lemma",
                           "jacobian-sdet", "theta-conditional", "cartesian-horospherical", "image-measure-super"})
      CHECK(ids.count(id) == 1);
    CHECK_THROWS_AS(find_check("no-such-check"), UnknownCheck);
    CHECK_THROWS_AS(run_check(spec("no-such-check")), UnknownCheck);
  }

  TEST_CASE("jacobian-sdet passes with residual exactly 0") {
    const Report r = run_check(spec("jacobian-sdet"));
    CHECK(r.pass);
    REQUIRE(!r.coefficients.empty());
    CHECK(r.coefficients.front().residual == 0.0);
  }

  TEST_CASE("reports are deterministic and runtime stays 0 without timing") {
    const std::string a = report_json(run_check(spec("laplace-real", 5000)));
    const std::string b = report_json(run_check(spec("laplace-real", 5000)));
    CHECK(a == b);
    CHECK(nlohmann::json::parse(a)["runtime_s"] == 0.0);
    CheckSpec other = spec("laplace-real", 5000);
    other.seed = 2;
    CHECK(report_json(run_check(other)) != a);
  }

  TEST_CASE("report JSON carries the documented keys") {
    const nlohmann::json j = nlohmann::json::parse(report_json(run_check(spec("ward", 5000))));
    for (const char* k : {"check", "verdict", "seed", "coefficients", "runtime_s"}) CHECK(j.contains(k));
    REQUIRE(!j["coefficients"].empty());
    for (const char* k : {"subset", "estimate", "stderr", "reference", "z"}) CHECK(j["coefficients"][0].contains(k));
    CHECK(!j.contains("trace"));
  }

  TEST_CASE("a zero z threshold fails and embeds traces") {
    CheckSpec s = spec("laplace-real", 5000);
    s.policy.z_threshold = 0.0;
    const Report r = run_check(s);
    CHECK_FALSE(r.pass);
    const nlohmann::json j = nlohmann::json::parse(report_json(r));
    CHECK(j["verdict"] == "fail");
    REQUIRE(j.contains("trace"));
    CHECK(!j["trace"].empty());
    CHECK(j["trace"][0].contains("rhat"));
  }

  TEST_CASE("a zero deterministic tolerance fails a check with rounding error") {
    CheckSpec s = spec("rho-equivalence");
    s.policy.tolerance = 0.0;
    CHECK_FALSE(run_check(s).pass);
  }

  TEST_CASE("Bonferroni raises the per-coefficient threshold") {
    CheckSpec s = spec("laplace-real", 5000);
    s.policy.bonferroni = true;
    const Report r = run_check(s);
    CHECK(r.z_threshold > 3.0);
  }

  TEST_CASE("a missing fixture surfaces as FixtureError") {
    CheckSpec s = spec("ward");
    s.graph_path = "/nonexistent/graph.json";
    CHECK_THROWS_AS(run_check(s), FixtureError);
  }

  TEST_CASE("suite filter and parallelism") {
    CheckSpec base;
    base.chain.n_samples = 3000;
    const SuiteResult one = run_suite("martingale-*", 1, base);
    CHECK(one.reports.size() == 3);
    const SuiteResult four = run_suite("martingale-*", 4, base);
    REQUIRE(four.reports.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(report_json(one.reports[k]) == report_json(four.reports[k]));
    CHECK(one.passed + one.failed == 3);
    CHECK(suite_seed(1, "ward") != suite_seed(1, "laplace-real"));
    CHECK(suite_seed(1, "ward") != suite_seed(2, "ward"));
  }

  TEST_CASE("failing checks are counted and flip the suite verdict") {
    CheckSpec base;
    base.policy.tolerance = 0.0;
    const SuiteResult s = run_suite("rho-*", 1, base);
    CHECK(s.failed == 1);
    CHECK_FALSE(s.all_pass());
    const nlohmann::json j = nlohmann::json::parse(suite_json(s));
    CHECK(j["summary"]["verdict"] == "fail");
  }
}

#ifndef HSIGMA_VERIFY_HPP
#define HSIGMA_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsigma/errors.hpp"
#include "hsigma/report.hpp"
#include "hsigma/sampler.hpp"

namespace hsigma {

/// No check is registered under the requested id.
class UnknownCheck : public Error {
 public:
  using Error::Error;
};

/// Optional overrides of a check's default chain settings.
struct ChainOverrides {
  std::optional<std::size_t> n_samples, burn_in, thinning, n_chains;
  std::optional<double> proposal_scale;
};

struct CheckSpec {
  std::string id;
  std::optional<std::string> graph_path;  ///< replaces the check's default graph fixture
  std::optional<std::string> tower_path;  ///< replaces the check's default tower fixture
  ChainOverrides chain;
  std::uint64_t seed = 1;
  Policy policy;
  bool timing = false;  ///< record wall-clock runtime; off keeps reports byte-reproducible
};

struct CheckInfo {
  std::string id;
  std::string description;
  double default_z = 3.0;
};

/// Every registered check, in suite order.
const std::vector<CheckInfo>& registry();
const CheckInfo& find_check(const std::string& id);

/// Runs one check with `spec.seed`. Throws UnknownCheck or FixtureError; other library
/// errors become a failing report with a note.
Report run_check(const CheckSpec& spec);

struct SuiteResult {
  std::vector<Report> reports;  ///< registry order
  std::size_t passed = 0, failed = 0;
  double runtime_s = 0.0;

  bool all_pass() const { return failed == 0 && !reports.empty(); }
};

/// Seed of check `id` inside a suite started from `base`.
std::uint64_t suite_seed(std::uint64_t base, const std::string& id);

/// Runs every check whose id matches the glob `filter`, up to `parallelism` at a time.
/// `base` supplies fixtures, overrides, policy and the base seed. Errors become failing reports.
SuiteResult run_suite(const std::string& filter, std::size_t parallelism, const CheckSpec& base);

/// Report as one JSON object; traces are embedded for failing reports.
std::string report_json(const Report& r, int indent = -1);
/// Suite as {"reports": [...], "summary": {...}}.
std::string suite_json(const SuiteResult& s, int indent = -1);
/// Fixed-width human-readable rendering.
std::string report_table(const Report& r);
std::string suite_table(const SuiteResult& s);

/// `HSIGMA_FIXTURE_DIR`/<name>.
std::string fixture_path(const std::string& name);

}  // namespace hsigma

#endif  // HSIGMA_VERIFY_HPP

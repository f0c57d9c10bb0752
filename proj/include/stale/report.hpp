#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stale/inference.hpp"
#include "stale/simnet.hpp"

namespace stale {

/// Reference value of the decay curve at lambda 0.25, p 0.2, s true,
/// t = 10 h: 0.2 + 0.8 * exp(-2.5), evaluated in 40-digit arithmetic.
inline constexpr double kCurveAt10h = 0.26566799889911903614;

/// Canonical simulator settings for recovering a known decay rate.
ScenarioConfig recovery_scenario(double lambda_delta);

struct ReportOptions {
  std::filesystem::path out_dir = "report";
  std::size_t particles = 50000;
  std::uint64_t sampler_seed = 7;
  std::size_t grid_size = kDefaultGridSize;
  unsigned workers = 0;
};

enum class Verdict { pass, warn, fail };

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::fail;
  std::string detail;
};

struct ReportResult {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  /// One "PASS|WARN|FAIL name: detail" line per check.
  std::string to_text() const;
};

/// Regenerates the three reference datasets, infers the decay-rate
/// posterior on each with both backends, runs the simulator recovery
/// and reactivity checks, and writes everything under out_dir.
/// Output bytes depend only on the options, never on timing or
/// worker count.
ReportResult run_report(const ReportOptions& options);

}  // namespace stale

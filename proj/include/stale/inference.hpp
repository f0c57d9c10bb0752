#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stale {

/// One day of actuator behavior: was the sprinkler on at noon, at midnight.
struct SprinklerRecord {
  bool s_noon = false;
  bool s_night = false;

  bool operator==(const SprinklerRecord&) const = default;
};

struct TimeWindow {
  double lo_h = 0.0;
  double hi_h = 0.0;

  double width() const { return hi_h - lo_h; }
  bool contains(double t_h) const { return t_h >= lo_h && t_h <= hi_h; }
};

/// The generative sprinkler query: humidity is measured at a uniformly
/// random time inside each window and the actuator decides at the query
/// time, with the observation softened by its age. The decay rate has a
/// Uniform(0, lambda_max) prior.
struct GenerativeConfig {
  double humidity_prior_p = 0.2;
  TimeWindow morning_window{0.0, 3.0};
  double morning_query_time_h = 12.0;
  TimeWindow evening_window{12.0, 15.0};
  double evening_query_time_h = 24.0;
  bool morning_humidity = true;
  bool evening_humidity = false;
  double lambda_max = 1.0;

  /// Throws std::invalid_argument if a window is empty, reaches past its
  /// query time, or the prior bound is not positive.
  void validate() const;
};

/// Likelihood of one record for a decay rate and known measurement times.
double record_likelihood(double lambda, const SprinklerRecord& record,
                         const GenerativeConfig& cfg, double t_noon_h, double t_night_h);

/// Probability that the sprinkler is on at each query time, with the
/// measurement times integrated out analytically.
struct OnProbabilities {
  double noon = 0.0;
  double night = 0.0;
};

OnProbabilities marginal_on_probabilities(double lambda, const GenerativeConfig& cfg);

/// The counts are sufficient statistics: records are exchangeable given lambda.
struct RecordCounts {
  std::size_t n = 0;
  std::size_t noon_on = 0;
  std::size_t night_on = 0;
};

RecordCounts count_records(std::span<const SprinklerRecord> records);

/// Dataset log-likelihood with measurement times marginalized. Returns
/// -infinity where the data is impossible.
double log_likelihood(double lambda, const RecordCounts& counts, const GenerativeConfig& cfg);

enum class PosteriorKind { weighted_samples, grid };

struct PosteriorResult {
  PosteriorKind kind = PosteriorKind::grid;
  std::vector<double> support;
  /// Normalized; same length as support.
  std::vector<double> weights;
  double mean = 0.0;
  double ci90_lo = 0.0;
  double ci90_hi = 0.0;
  double effective_sample_size = 0.0;
};

/// Raised when every weight vanishes and no posterior can be formed.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& what, double ess)
      : std::runtime_error(what), ess_(ess) {}
  double effective_sample_size() const { return ess_; }

 private:
  double ess_;
};

inline constexpr std::size_t kDefaultGridSize = 2000;

/// Exact posterior on a uniform grid of `grid_size` points spanning
/// [0, lambda_max], endpoints included.
PosteriorResult posterior_oracle(std::span<const SprinklerRecord> records,
                                 const GenerativeConfig& cfg,
                                 std::size_t grid_size = kDefaultGridSize);

struct ImportanceOptions {
  std::size_t n_particles = 50000;
  std::uint64_t seed = 7;
  /// Worker threads; 0 picks the hardware concurrency. The result does
  /// not depend on this value.
  unsigned workers = 0;
};

/// Likelihood weighting: each particle draws lambda from the prior and a
/// fresh pair of measurement times per record. Particle i uses a random
/// stream derived from (seed, i) only.
PosteriorResult posterior_importance(std::span<const SprinklerRecord> records,
                                     const GenerativeConfig& cfg,
                                     const ImportanceOptions& options);

struct HistogramBin {
  double lo;
  double hi;
  double mass;
};

struct PosteriorSummary {
  double mean = 0.0;
  double ci90_lo = 0.0;
  double ci90_hi = 0.0;
  std::vector<HistogramBin> histogram;
};

inline constexpr std::size_t kHistogramBins = 50;

PosteriorSummary summarize(const PosteriorResult& result, double support_hi = 1.0,
                           std::size_t bins = kHistogramBins);

/// Posterior mass strictly above `threshold`.
double mass_above(const PosteriorResult& result, double threshold);

/// Half the L1 distance between two histograms over identical bins.
double total_variation(std::span<const HistogramBin> a, std::span<const HistogramBin> b);

}  // namespace stale

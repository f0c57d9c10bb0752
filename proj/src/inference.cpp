#include "stale/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "stale/decay.hpp"
#include "stale/random.hpp"

namespace stale {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_window(const TimeWindow& w, double query_h, const char* name) {
  if (!std::isfinite(w.lo_h) || !std::isfinite(w.hi_h) || !(w.lo_h < w.hi_h)) {
    throw std::invalid_argument(std::string(name) + " window must be a non-empty interval");
  }
  if (w.lo_h < 0.0) {
    throw std::invalid_argument(std::string(name) + " window must start at or after 0");
  }
  if (!(w.hi_h <= query_h)) {
    throw std::invalid_argument(std::string(name) + " window must end before its query time");
  }
}

// P(sprinkler on) for one decision: 1 - h*, where h* is the softened
// humidity observation.
double on_probability(double lambda, bool humid, double p, double delay_h) {
  return 1.0 - decayed_true_probability(DecayModel(lambda, p), {humid, delay_h});
}

double bernoulli_mass(bool outcome, double p_on) {
  return outcome ? p_on : 1.0 - p_on;
}

// Mean of exp(-lambda * d) for d uniform on [d_min, d_min + width].
double mean_retention(double lambda, double d_min, double width) {
  const double x = lambda * width;
  const double shape = x < 1e-6 ? 1.0 - x / 2.0 + x * x / 6.0 : -std::expm1(-x) / x;
  return std::exp(-lambda * d_min) * shape;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double count_term(std::size_t n, double q) {
  return n == 0 ? 0.0 : static_cast<double>(n) * std::log(q);
}

struct Normalized {
  std::vector<double> weights;
  double ess;
};

// exp-normalizes log-weights; throws when all of them are -inf.
Normalized normalize_log_weights(const std::vector<double>& log_w, const char* backend) {
  const double top = log_w.empty() ? kNegInf : *std::max_element(log_w.begin(), log_w.end());
  if (!(top > kNegInf)) {
    throw DegeneracyError(std::string(backend) +
                              ": every weight is zero (effective sample size 0)",
                          0.0);
  }
  std::vector<double> w(log_w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_w[i] - top);
    total += w[i];
  }
  double sq = 0.0;
  for (auto& x : w) {
    x /= total;
    sq += x * x;
  }
  return {std::move(w), 1.0 / sq};
}

void fill_statistics(PosteriorResult& r) {
  const auto s = summarize(r, std::numeric_limits<double>::infinity(), 0);
  r.mean = s.mean;
  r.ci90_lo = s.ci90_lo;
  r.ci90_hi = s.ci90_hi;
}

}  // namespace

void GenerativeConfig::validate() const {
  if (!(humidity_prior_p >= 0.0 && humidity_prior_p <= 1.0)) {
    throw std::invalid_argument("humidity prior must lie in [0, 1]");
  }
  check_window(morning_window, morning_query_time_h, "morning");
  check_window(evening_window, evening_query_time_h, "evening");
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw std::invalid_argument("lambda prior bound must be positive and finite");
  }
}

double record_likelihood(double lambda, const SprinklerRecord& record,
                         const GenerativeConfig& cfg, double t_noon_h, double t_night_h) {
  if (!cfg.morning_window.contains(t_noon_h) || !cfg.evening_window.contains(t_night_h)) {
    throw std::invalid_argument("measurement time outside its window");
  }
  if (!(lambda >= 0.0 && lambda <= cfg.lambda_max)) {
    throw std::invalid_argument("lambda outside the prior support");
  }
  const double noon = on_probability(lambda, cfg.morning_humidity, cfg.humidity_prior_p,
                                     cfg.morning_query_time_h - t_noon_h);
  const double night = on_probability(lambda, cfg.evening_humidity, cfg.humidity_prior_p,
                                      cfg.evening_query_time_h - t_night_h);
  return bernoulli_mass(record.s_noon, noon) * bernoulli_mass(record.s_night, night);
}

OnProbabilities marginal_on_probabilities(double lambda, const GenerativeConfig& cfg) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  const double p = cfg.humidity_prior_p;
  // Averaging 1 - h* over the window: (1 - p) - (s - p) * E[retention].
  auto on = [&](bool humid, const TimeWindow& w, double query_h) {
    const double s = humid ? 1.0 : 0.0;
    const double r = mean_retention(lambda, query_h - w.hi_h, w.width());
    return clamp01((1.0 - p) - (s - p) * r);
  };
  return {on(cfg.morning_humidity, cfg.morning_window, cfg.morning_query_time_h),
          on(cfg.evening_humidity, cfg.evening_window, cfg.evening_query_time_h)};
}

RecordCounts count_records(std::span<const SprinklerRecord> records) {
  RecordCounts c;
  c.n = records.size();
  for (const auto& r : records) {
    c.noon_on += r.s_noon ? 1 : 0;
    c.night_on += r.s_night ? 1 : 0;
  }
  return c;
}

double log_likelihood(double lambda, const RecordCounts& counts, const GenerativeConfig& cfg) {
  const auto q = marginal_on_probabilities(lambda, cfg);
  const double ll = count_term(counts.noon_on, q.noon) +
                    count_term(counts.n - counts.noon_on, 1.0 - q.noon) +
                    count_term(counts.night_on, q.night) +
                    count_term(counts.n - counts.night_on, 1.0 - q.night);
  return std::isnan(ll) ? kNegInf : ll;
}

PosteriorResult posterior_oracle(std::span<const SprinklerRecord> records,
                                 const GenerativeConfig& cfg, std::size_t grid_size) {
  cfg.validate();
  if (records.empty()) throw std::invalid_argument("posterior of an empty dataset");
  if (grid_size < 100) throw std::invalid_argument("grid needs at least 100 points");

  const auto counts = count_records(records);
  PosteriorResult r;
  r.kind = PosteriorKind::grid;
  r.support.resize(grid_size);
  std::vector<double> log_w(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    r.support[i] = cfg.lambda_max * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    log_w[i] = log_likelihood(r.support[i], counts, cfg);
  }
  auto norm = normalize_log_weights(log_w, "grid posterior");
  r.weights = std::move(norm.weights);
  r.effective_sample_size = norm.ess;
  fill_statistics(r);
  return r;
}

PosteriorResult posterior_importance(std::span<const SprinklerRecord> records,
                                     const GenerativeConfig& cfg,
                                     const ImportanceOptions& options) {
  cfg.validate();
  if (options.n_particles < 1) throw std::invalid_argument("need at least one particle");

  const std::size_t n = options.n_particles;
  std::vector<double> lambdas(n);
  std::vector<double> log_w(n);

  const double p = cfg.humidity_prior_p;
  const double s_morning = cfg.morning_humidity ? 1.0 : 0.0;
  const double s_evening = cfg.evening_humidity ? 1.0 : 0.0;

  auto run_particle = [&](std::size_t i) {
    Rng rng(derive_seed(options.seed, i));
    const double lambda = rng.uniform(0.0, cfg.lambda_max);
    double log_sum = 0.0;
    double product = 1.0;
    for (const auto& rec : records) {
      const double t_noon = rng.uniform(cfg.morning_window.lo_h, cfg.morning_window.hi_h);
      const double t_night = rng.uniform(cfg.evening_window.lo_h, cfg.evening_window.hi_h);
      // Same arithmetic as record_likelihood, minus the per-call checks.
      const double k1 = std::exp(-lambda * (cfg.morning_query_time_h - t_noon));
      const double k2 = std::exp(-lambda * (cfg.evening_query_time_h - t_night));
      const double on1 = 1.0 - (k1 * s_morning + (1.0 - k1) * p);
      const double on2 = 1.0 - (k2 * s_evening + (1.0 - k2) * p);
      product *= bernoulli_mass(rec.s_noon, on1) * bernoulli_mass(rec.s_night, on2);
      if (product < 1e-250) {
        if (product <= 0.0) {
          log_sum = kNegInf;
          product = 1.0;
          break;
        }
        log_sum += std::log(product);
        product = 1.0;
      }
    }
    lambdas[i] = lambda;
    log_w[i] = log_sum + std::log(product);
  };

  unsigned workers = options.workers != 0 ? options.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) run_particle(i);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      pool.emplace_back([&, begin, end] {
        for (std::size_t i = begin; i < end; ++i) run_particle(i);
      });
    }
  }

  auto norm = normalize_log_weights(log_w, "importance sampler");
  PosteriorResult r;
  r.kind = PosteriorKind::weighted_samples;
  r.support = std::move(lambdas);
  r.weights = std::move(norm.weights);
  r.effective_sample_size = norm.ess;
  fill_statistics(r);
  return r;
}

PosteriorSummary summarize(const PosteriorResult& result, double support_hi, std::size_t bins) {
  PosteriorSummary s;
  const auto& x = result.support;
  const auto& w = result.weights;
  if (x.size() != w.size() || x.empty()) {
    throw std::invalid_argument("posterior support and weights must be non-empty and aligned");
  }

  for (std::size_t i = 0; i < x.size(); ++i) s.mean += w[i] * x[i];

  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  auto quantile = [&](double q) {
    double cum = 0.0;
    for (auto i : order) {
      cum += w[i];
      if (cum >= q) return x[i];
    }
    return x[order.back()];
  };
  s.ci90_lo = quantile(0.05);
  s.ci90_hi = quantile(0.95);

  if (bins > 0) {
    const double width = support_hi / static_cast<double>(bins);
    s.histogram.reserve(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      s.histogram.push_back({width * static_cast<double>(b),
                             b + 1 == bins ? support_hi : width * static_cast<double>(b + 1),
                             0.0});
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto b = static_cast<std::size_t>(std::max(0.0, x[i] / width));
      s.histogram[std::min(b, bins - 1)].mass += w[i];
    }
  }
  return s;
}

double mass_above(const PosteriorResult& result, double threshold) {
  double m = 0.0;
  for (std::size_t i = 0; i < result.support.size(); ++i) {
    if (result.support[i] > threshold) m += result.weights[i];
  }
  return m;
}

double total_variation(std::span<const HistogramBin> a, std::span<const HistogramBin> b) {
  if (a.size() != b.size()) throw std::invalid_argument("histograms differ in bin count");
  double l1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i].mass - b[i].mass);
  return 0.5 * l1;
}

}  // namespace stale

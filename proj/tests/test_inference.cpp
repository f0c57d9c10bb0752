#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "stale/datagen.hpp"
#include "stale/inference.hpp"

using namespace stale;

namespace {

// Posterior means on the canonical datasets, computed once with a
// 30-digit mpmath evaluation of the count-form likelihood on the same
// 2000-point grid.
constexpr double kCase1Mean = 2.64417083525e-6;
constexpr double kCase2Mean = 0.0314582258542;
constexpr double kCase3Mean = 0.643909322751;

// Midpoint rule over the window, using the fact that the two noon
// outcomes of record_likelihood sum to the night factor.
OnProbabilities quadrature_on_probabilities(double lambda, const GenerativeConfig& cfg) {
  const int n = 100000;
  const double t_night_fixed = 0.5 * (cfg.evening_window.lo_h + cfg.evening_window.hi_h);
  const double t_noon_fixed = 0.5 * (cfg.morning_window.lo_h + cfg.morning_window.hi_h);
  double noon = 0.0, night = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    const double tn = cfg.morning_window.lo_h + u * cfg.morning_window.width();
    const double on_on = record_likelihood(lambda, {true, true}, cfg, tn, t_night_fixed);
    const double off_on = record_likelihood(lambda, {false, true}, cfg, tn, t_night_fixed);
    noon += on_on / (on_on + off_on);

    const double tt = cfg.evening_window.lo_h + u * cfg.evening_window.width();
    const double a = record_likelihood(lambda, {false, true}, cfg, t_noon_fixed, tt);
    const double b = record_likelihood(lambda, {false, false}, cfg, t_noon_fixed, tt);
    night += a / (a + b);
  }
  return {noon / n, night / n};
}

std::vector<SprinklerRecord> canonical(int k) { return generate(canonical_case(k)); }

}  // namespace

TEST_CASE("record likelihood examples") {
  const GenerativeConfig cfg;
  CHECK(record_likelihood(0.0, {false, true}, cfg, 1.0, 13.0) == 1.0);
  CHECK(record_likelihood(0.0, {true, true}, cfg, 1.0, 13.0) == 0.0);
  CHECK(record_likelihood(0.0, {true, false}, cfg, 2.5, 14.0) == 0.0);

  // lambda 0.25, measured at 2:00, so 10 h old at noon.
  const double noon_on = 1.0 - (0.2 + 0.8 * std::exp(-2.5));
  const double night_on = 1.0 - 0.2 * (1.0 - std::exp(-0.25 * 10.0));
  CHECK(record_likelihood(0.25, {true, true}, cfg, 2.0, 14.0) ==
        doctest::Approx(noon_on * night_on).epsilon(1e-14));
  CHECK(noon_on == doctest::Approx(0.73433200110088096).epsilon(1e-14));
}

TEST_CASE("record likelihood rejects out-of-window times") {
  const GenerativeConfig cfg;
  CHECK_THROWS_AS(record_likelihood(0.1, {true, true}, cfg, 3.5, 13.0), std::invalid_argument);
  CHECK_THROWS_AS(record_likelihood(0.1, {true, true}, cfg, 1.0, 11.0), std::invalid_argument);
  CHECK_THROWS_AS(record_likelihood(1.5, {true, true}, cfg, 1.0, 13.0), std::invalid_argument);
}

TEST_CASE("config validation") {
  GenerativeConfig cfg;
  cfg.morning_window = {0.0, 13.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.evening_window = {15.0, 12.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.lambda_max = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_NOTHROW(GenerativeConfig{}.validate());
}

TEST_CASE("marginal on-probabilities: limits and closed form") {
  const GenerativeConfig cfg;
  const auto zero = marginal_on_probabilities(0.0, cfg);
  CHECK(zero.noon == 0.0);
  CHECK(zero.night == 1.0);
  const auto tiny = marginal_on_probabilities(1e-9, cfg);
  CHECK(tiny.noon == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(tiny.night == doctest::Approx(1.0).epsilon(1e-8));

  GenerativeConfig wide = cfg;
  wide.lambda_max = 1000.0;
  const auto inf = marginal_on_probabilities(200.0, wide);
  CHECK(inf.noon == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(inf.night == doctest::Approx(0.8).epsilon(1e-12));

  for (double l : {0.01, 0.1, 0.25, 0.5, 1.0}) {
    const double shape = std::exp(-12 * l) * (std::exp(3 * l) - 1) / (3 * l);
    const auto q = marginal_on_probabilities(l, cfg);
    CHECK(q.noon == doctest::Approx(0.8 * (1 - shape)).epsilon(1e-12));
    CHECK(q.night == doctest::Approx(0.8 + 0.2 * shape).epsilon(1e-12));
  }
}

TEST_CASE("marginal on-probabilities agree with numerical quadrature") {
  const GenerativeConfig cfg;
  for (double l : {0.0, 1e-4, 0.03, 0.1, 0.25, 0.6, 1.0}) {
    const auto q = marginal_on_probabilities(l, cfg);
    const auto ref = quadrature_on_probabilities(l, cfg);
    CHECK(std::abs(q.noon - ref.noon) < 1e-6);
    CHECK(std::abs(q.night - ref.night) < 1e-6);
  }
  // A non-default schedule exercises the general window formula.
  GenerativeConfig other;
  other.morning_window = {5.0, 9.0};
  other.morning_query_time_h = 10.0;
  other.evening_window = {16.0, 18.5};
  other.evening_humidity = true;
  other.humidity_prior_p = 0.35;
  for (double l : {0.02, 0.4, 0.9}) {
    const auto q = marginal_on_probabilities(l, other);
    const auto ref = quadrature_on_probabilities(l, other);
    CHECK(std::abs(q.noon - ref.noon) < 1e-6);
    CHECK(std::abs(q.night - ref.night) < 1e-6);
  }
}

TEST_CASE("sufficiency collapse: per-record sum equals the count form") {
  const GenerativeConfig cfg;
  const auto data = canonical(2);
  const auto counts = count_records(data);
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> lam(1e-3, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double l = lam(gen);
    const auto q = marginal_on_probabilities(l, cfg);
    double per_record = 0.0;
    for (const auto& r : data) {
      per_record += std::log(r.s_noon ? q.noon : 1 - q.noon);
      per_record += std::log(r.s_night ? q.night : 1 - q.night);
    }
    const double collapsed = log_likelihood(l, counts, cfg);
    REQUIRE(std::abs(per_record - collapsed) <= 1e-9 * std::abs(per_record));
  }
}

TEST_CASE("log-likelihood stays finite at a million records") {
  const GenerativeConfig cfg;
  const RecordCounts counts{1000000, 612345, 876543};
  for (double l : {1e-6, 0.001, 0.1, 0.5, 1.0}) {
    CHECK(std::isfinite(log_likelihood(l, counts, cfg)));
  }
  std::vector<SprinklerRecord> big(1000000, SprinklerRecord{true, true});
  for (std::size_t i = 0; i < big.size(); i += 3) big[i] = {false, true};
  const auto post = posterior_oracle(big, cfg);
  CHECK(std::isfinite(post.mean));
  double total = 0.0;
  for (double w : post.weights) total += w;
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("oracle posteriors on the reference cases") {
  const GenerativeConfig cfg;
  const auto p1 = posterior_oracle(canonical(1), cfg);
  const auto p2 = posterior_oracle(canonical(2), cfg);
  const auto p3 = posterior_oracle(canonical(3), cfg);

  CHECK(p1.support.size() == kDefaultGridSize);
  CHECK(p1.support.front() == 0.0);
  CHECK(p1.support.back() == 1.0);

  CHECK(p1.mean == doctest::Approx(kCase1Mean).epsilon(1e-8));
  CHECK(p2.mean == doctest::Approx(kCase2Mean).epsilon(1e-9));
  CHECK(p3.mean == doctest::Approx(kCase3Mean).epsilon(1e-9));

  CHECK(p1.mean < 0.02);
  CHECK(summarize(p1).ci90_hi < 0.05);
  CHECK(p1.mean < p2.mean);
  CHECK(p2.mean < p3.mean);
  CHECK(mass_above(p3, 0.2) >= 0.9);

  for (const auto* p : {&p1, &p2, &p3}) {
    double total = 0.0;
    for (double w : p->weights) {
      REQUIRE(w >= 0.0);
      total += w;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("oracle on a single record") {
  const GenerativeConfig cfg;
  const std::vector<SprinklerRecord> one{{false, true}};
  const auto post = posterior_oracle(one, cfg, 500);
  const auto top = std::max_element(post.weights.begin(), post.weights.end());
  CHECK(top == post.weights.begin());
  // Proportional to (1 - q_noon) * q_night.
  double z = 0.0;
  for (double l : post.support) {
    const auto q = marginal_on_probabilities(l, cfg);
    z += (1 - q.noon) * q.night;
  }
  for (std::size_t i = 0; i < post.support.size(); i += 37) {
    const auto q = marginal_on_probabilities(post.support[i], cfg);
    CHECK(post.weights[i] == doctest::Approx((1 - q.noon) * q.night / z).epsilon(1e-10));
  }
}

TEST_CASE("oracle input errors") {
  const GenerativeConfig cfg;
  CHECK_THROWS_AS(posterior_oracle({}, cfg), std::invalid_argument);
  const std::vector<SprinklerRecord> one{{false, true}};
  CHECK_THROWS_AS(posterior_oracle(one, cfg, 99), std::invalid_argument);
}

TEST_CASE("impossible data is reported as degenerate") {
  // Humidity never observed and p = 0: the sprinkler is always on.
  GenerativeConfig cfg;
  cfg.humidity_prior_p = 0.0;
  cfg.morning_humidity = false;
  cfg.evening_humidity = false;
  const std::vector<SprinklerRecord> data{{false, true}};
  CHECK_THROWS_AS(posterior_oracle(data, cfg), DegeneracyError);
  try {
    posterior_importance(data, cfg, {100, 1, 1});
    FAIL("expected a degeneracy error");
  } catch (const DegeneracyError& e) {
    CHECK(e.effective_sample_size() == 0.0);
    CHECK(std::string(e.what()).find("effective sample size") != std::string::npos);
  }
}

TEST_CASE("a likelihood constant in lambda returns the prior") {
  GenerativeConfig cfg;
  cfg.humidity_prior_p = 0.0;
  cfg.morning_humidity = false;
  cfg.evening_humidity = false;
  const std::vector<SprinklerRecord> vacuous{{true, true}};

  const auto grid = posterior_oracle(vacuous, cfg);
  for (double w : grid.weights) REQUIRE(w == doctest::Approx(1.0 / kDefaultGridSize));
  CHECK(grid.mean == doctest::Approx(0.5).epsilon(1e-12));

  const auto is = posterior_importance(vacuous, cfg, {20000, 3, 1});
  for (double w : is.weights) REQUIRE(w == doctest::Approx(1.0 / 20000));
  CHECK(std::abs(is.mean - 0.5) < 0.01);
  CHECK(is.effective_sample_size == doctest::Approx(20000.0));
}

TEST_CASE("importance sampler is deterministic and worker-independent") {
  const GenerativeConfig cfg;
  const auto data = canonical(2);
  const auto a = posterior_importance(data, cfg, {3000, 11, 1});
  const auto b = posterior_importance(data, cfg, {3000, 11, 1});
  const auto c = posterior_importance(data, cfg, {3000, 11, 3});
  CHECK(a.weights == b.weights);
  CHECK(a.support == b.support);
  CHECK(a.weights == c.weights);
  CHECK(a.support == c.support);
  const auto d = posterior_importance(data, cfg, {3000, 12, 1});
  CHECK(a.support != d.support);

  CHECK_THROWS_AS(posterior_importance(data, cfg, {0, 1, 1}), std::invalid_argument);
  for (double l : a.support) {
    REQUIRE(l >= 0.0);
    REQUIRE(l <= cfg.lambda_max);
  }
}

TEST_CASE("importance sampler tracks the oracle") {
  const GenerativeConfig cfg;
  for (int k : {1, 3}) {
    const auto data = canonical(k);
    const auto is = posterior_importance(data, cfg, {10000, 5, 0});
    const auto grid = posterior_oracle(data, cfg);
    CHECK(std::abs(is.mean - grid.mean) < 0.02);
    CHECK(total_variation(summarize(is).histogram, summarize(grid).histogram) <= 0.1);
  }
}

TEST_CASE("summaries") {
  PosteriorResult point;
  point.support = {0.3};
  point.weights = {1.0};
  const auto s = summarize(point);
  CHECK(s.mean == doctest::Approx(0.3));
  CHECK(s.ci90_lo == 0.3);
  CHECK(s.ci90_hi == 0.3);
  REQUIRE(s.histogram.size() == kHistogramBins);
  CHECK(s.histogram[15].mass == 1.0);
  CHECK(s.histogram.back().hi == 1.0);

  PosteriorResult flat;
  const int n = 2001;
  for (int i = 0; i < n; ++i) {
    flat.support.push_back(i / double(n - 1));
    flat.weights.push_back(1.0 / n);
  }
  const auto f = summarize(flat);
  CHECK(std::abs(f.mean - 0.5) < 1.0 / n);
  CHECK(std::abs(f.ci90_lo - 0.05) < 2.0 / n);
  CHECK(std::abs(f.ci90_hi - 0.95) < 2.0 / n);
  double total = 0.0;
  for (const auto& b : f.histogram) total += b.mass;
  CHECK(total == doctest::Approx(1.0));
  CHECK(total_variation(f.histogram, f.histogram) == 0.0);
  CHECK(total_variation(s.histogram, f.histogram) == doctest::Approx(1.0 - f.histogram[15].mass));

  PosteriorResult bad;
  CHECK_THROWS_AS(summarize(bad), std::invalid_argument);
}

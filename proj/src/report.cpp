#include "stale/report.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "stale/datagen.hpp"
#include "stale/decay.hpp"
#include "stale/io.hpp"

namespace stale {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kMeanTolerance = 0.02;
constexpr double kTvTolerance = 0.1;

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::warn: return "WARN";
    case Verdict::fail: return "FAIL";
  }
  return "FAIL";
}

CheckResult check(std::string name, bool ok, std::string detail,
                  Verdict on_failure = Verdict::fail) {
  return {std::move(name), ok ? Verdict::pass : on_failure, std::move(detail)};
}

ojson summary_json(const PosteriorResult& r, const PosteriorSummary& s) {
  ojson j;
  j["mean"] = s.mean;
  j["ci90_lo"] = s.ci90_lo;
  j["ci90_hi"] = s.ci90_hi;
  j["mass_above_0.2"] = mass_above(r, 0.2);
  j["effective_sample_size"] = r.effective_sample_size;
  return j;
}

}  // namespace

ScenarioConfig recovery_scenario(double lambda_delta) {
  ScenarioConfig c;
  c.lambda_delta = lambda_delta;
  c.days = 1000;
  c.seed = 4242;
  return c;
}

bool ReportResult::all_pass() const {
  for (const auto& c : checks) {
    if (c.verdict != Verdict::pass) return false;
  }
  return true;
}

std::string ReportResult::to_text() const {
  std::string out;
  for (const auto& c : checks) {
    out += std::string(verdict_name(c.verdict)) + " " + c.name + ": " + c.detail + "\n";
  }
  return out;
}

ReportResult run_report(const ReportOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create " + options.out_dir.string());
  auto out = [&](const std::string& name) { return options.out_dir / name; };

  ReportResult report;
  const GenerativeConfig cfg;
  ojson summary;

  // Decay curve.
  {
    const DecayModel model(0.25, 0.2);
    std::vector<double> grid;
    for (int i = 0; i <= 240; ++i) grid.push_back(i * 0.1);
    const auto curve = decay_curve(model, true, grid);
    write_file_atomic(out("decay_curve.csv"), curve_to_csv(curve));
    const double at0 = curve.front().probability;
    const double at10 = curve[100].probability;
    summary["decay_curve"] = {{"lambda", 0.25}, {"p", 0.2}, {"at_0h", at0}, {"at_10h", at10}};
    report.checks.push_back(check("decay-curve",
                                  at0 == 1.0 && std::abs(at10 - kCurveAt10h) <= 1e-5,
                                  "value at 0 h " + format_number(at0) + ", at 10 h " +
                                      format_number(at10)));
  }

  // Three reference cases.
  std::array<PosteriorResult, 3> oracle;
  std::array<PosteriorSummary, 3> oracle_sum;
  std::array<CheckResult, 3> sampler_checks;
  summary["cases"] = ojson::array();
  for (int k = 1; k <= 3; ++k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    const CaseSpec spec = canonical_case(k);
    const auto data = generate(spec);
    const std::string tag = "case" + std::to_string(k);
    write_file_atomic(out(tag + ".jsonl"), dataset_to_jsonl(data));

    oracle[idx] = posterior_oracle(data, cfg, options.grid_size);
    oracle_sum[idx] = summarize(oracle[idx], cfg.lambda_max);
    write_file_atomic(out("posterior_oracle_" + tag + ".csv"), posterior_to_csv(oracle[idx]));

    ojson cj;
    cj["case"] = k;
    cj["p_noon"] = spec.p_noon;
    cj["p_night"] = spec.p_night;
    cj["n_records"] = spec.n_records;
    cj["seed"] = spec.seed;
    cj["oracle"] = summary_json(oracle[idx], oracle_sum[idx]);

    ImportanceOptions io{options.particles, options.sampler_seed + static_cast<std::uint64_t>(k),
                         options.workers};
    try {
      const auto is = posterior_importance(data, cfg, io);
      const auto is_sum = summarize(is, cfg.lambda_max);
      write_file_atomic(out("posterior_is_" + tag + ".csv"), posterior_to_csv(is));
      const double dmean = std::abs(is_sum.mean - oracle_sum[idx].mean);
      const double tv = total_variation(is_sum.histogram, oracle_sum[idx].histogram);
      cj["importance"] = summary_json(is, is_sum);
      cj["importance"]["tv_to_oracle"] = tv;
      sampler_checks[idx] = check("sampler-agreement-" + tag,
                                  dmean <= kMeanTolerance && tv <= kTvTolerance,
                                  "|mean diff| " + format_number(dmean) + ", TV " +
                                      format_number(tv) + ", ESS " +
                                      format_number(is.effective_sample_size),
                                  Verdict::warn);
    } catch (const DegeneracyError& e) {
      cj["importance"] = {{"error", e.what()}};
      sampler_checks[idx] = check("sampler-agreement-" + tag, false, e.what(), Verdict::warn);
    }

    std::string hist = "bin_lo,bin_hi,oracle_mass\n";
    for (const auto& b : oracle_sum[idx].histogram) {
      hist += format_number(b.lo) + "," + format_number(b.hi) + "," + format_number(b.mass) + "\n";
    }
    write_file_atomic(out("histogram_oracle_" + tag + ".csv"), hist);
    summary["cases"].push_back(cj);
  }

  report.checks.push_back(check("case1-practically-zero",
                                oracle_sum[0].mean < 0.02 && oracle_sum[0].ci90_hi < 0.05,
                                "mean " + format_number(oracle_sum[0].mean) + ", 90% upper " +
                                    format_number(oracle_sum[0].ci90_hi)));
  report.checks.push_back(check(
      "case-ordering",
      oracle_sum[0].mean < oracle_sum[1].mean && oracle_sum[1].mean < oracle_sum[2].mean,
      "means " + format_number(oracle_sum[0].mean) + " < " + format_number(oracle_sum[1].mean) +
          " < " + format_number(oracle_sum[2].mean)));
  const double case3_mass = mass_above(oracle[2], 0.2);
  report.checks.push_back(check("case3-decay-scale", case3_mass >= 0.9,
                                "posterior mass above 0.2 is " + format_number(case3_mass)));
  for (auto& c : sampler_checks) report.checks.push_back(std::move(c));

  // Simulator recovery and reactivity.
  {
    const std::array<double, 3> lambdas{0.0, 0.1, 0.25};
    std::array<double, 3> means{};
    bool audits = true;
    ojson rec = ojson::array();
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const auto sim = run_scenario(recovery_scenario(lambdas[i]));
      const auto post = posterior_oracle(sim.dataset, cfg, options.grid_size);
      means[i] = post.mean;
      audits = audits && no_heartbeat_audit(sim.trace);
      const std::string tag = "sim_lambda_" + format_number(lambdas[i]);
      write_file_atomic(out(tag + ".jsonl"), dataset_to_jsonl(sim.dataset));
      write_file_atomic(out(tag + "_trace.jsonl"), trace_to_jsonl(sim.trace));
      rec.push_back({{"lambda", lambdas[i]}, {"posterior_mean", post.mean},
                     {"ci90_lo", post.ci90_lo}, {"ci90_hi", post.ci90_hi}});
    }
    summary["recovery"] = rec;

    auto zero = recovery_scenario(0.0);
    zero.latency_mode = LatencyMode::zero;
    const auto exact = run_scenario(zero);
    bool all_case1 = true;
    for (const auto& r : exact.dataset) all_case1 = all_case1 && !r.s_noon && r.s_night;

    report.checks.push_back(check("simulator-recovery",
                                  means[0] < means[1] && means[1] < means[2] && all_case1,
                                  "means " + format_number(means[0]) + " < " +
                                      format_number(means[1]) + " < " + format_number(means[2]) +
                                      (all_case1 ? ", zero-latency run is exactly case 1"
                                                 : ", zero-latency run deviates from case 1")));

    auto lazy = recovery_scenario(0.25);
    lazy.epsilon = 1.0;
    const auto quiet = run_scenario(lazy);
    audits = audits && no_heartbeat_audit(quiet.trace) && no_heartbeat_audit(exact.trace);
    report.checks.push_back(check("reactivity",
                                  audits && quiet.stats.transmissions == 1,
                                  std::string(audits ? "all traces reactive" : "heartbeat found") +
                                      ", epsilon 1 sent " +
                                      std::to_string(quiet.stats.transmissions) +
                                      " notification(s)"));
  }

  summary["checks"] = ojson::array();
  for (const auto& c : report.checks) {
    summary["checks"].push_back(
        {{"name", c.name}, {"verdict", verdict_name(c.verdict)}, {"detail", c.detail}});
  }
  write_file_atomic(out("summary.json"), summary.dump(2) + "\n");
  write_file_atomic(out("acceptance.txt"), report.to_text());
  return report;
}

}  // namespace stale

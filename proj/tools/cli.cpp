#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "stale/datagen.hpp"
#include "stale/decay.hpp"
#include "stale/graph.hpp"
#include "stale/inference.hpp"
#include "stale/io.hpp"
#include "stale/report.hpp"
#include "stale/simnet.hpp"

namespace stale::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void refuse_overwrite(const fs::path& path, bool force) {
  if (!force && fs::exists(path)) {
    throw IoError(path.string() + " exists; pass --force to overwrite");
  }
}

fs::path default_out_dir(const char* fallback) {
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return fallback;
}

struct GenArgs {
  std::string which = "1";
  double p_noon = -1.0;
  double p_night = -1.0;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool force = false;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  CaseSpec spec;
  if (a.which == "custom") {
    if (a.p_noon < 0.0 || a.p_night < 0.0) {
      throw UsageError("--case custom needs --p-noon and --p-night");
    }
    spec = CaseSpec{a.p_noon, a.p_night, a.n, a.seed_set ? a.seed : 1};
  } else {
    spec = canonical_case(std::stoi(a.which));
    spec.n_records = a.n;
    if (a.seed_set) spec.seed = a.seed;
  }
  refuse_overwrite(a.out, a.force);
  const auto data = generate(spec);
  write_file_atomic(a.out, dataset_to_jsonl(data));
  out << "wrote " << data.size() << " records to " << a.out << "\n";
  return kOk;
}

struct InferArgs {
  std::string data;
  std::string backend = "oracle";
  std::size_t particles = 50000;
  std::uint64_t seed = 7;
  std::size_t grid = kDefaultGridSize;
  double lambda_max = 1.0;
  double humidity_p = 0.2;
  unsigned threads = 0;
  std::string posterior_csv;
  std::string histogram_csv;
  std::string summary_json;
};

int cmd_infer(const InferArgs& a, std::ostream& out) {
  const auto data = dataset_from_jsonl(read_file(a.data));
  if (data.empty()) throw IoError(a.data + " contains no records");

  GenerativeConfig cfg;
  cfg.lambda_max = a.lambda_max;
  cfg.humidity_prior_p = a.humidity_p;
  const PosteriorResult post =
      a.backend == "is"
          ? posterior_importance(data, cfg, ImportanceOptions{a.particles, a.seed, a.threads})
          : posterior_oracle(data, cfg, a.grid);
  const auto s = summarize(post, cfg.lambda_max);

  if (!a.posterior_csv.empty()) write_file_atomic(a.posterior_csv, posterior_to_csv(post));
  if (!a.histogram_csv.empty()) write_file_atomic(a.histogram_csv, histogram_to_csv(s.histogram));

  nlohmann::ordered_json j;
  j["mean"] = s.mean;
  j["ci90_lo"] = s.ci90_lo;
  j["ci90_hi"] = s.ci90_hi;
  j["n_records"] = data.size();
  j["backend"] = a.backend;
  const std::string text = j.dump() + "\n";
  if (!a.summary_json.empty()) {
    write_file_atomic(a.summary_json, text);
  } else {
    out << text;
  }
  return kOk;
}

struct CurveArgs {
  double lambda = 0.25;
  double p = 0.2;
  bool s = true;
  double t_max = 12.0;
  std::size_t steps = 121;
  std::string out;
};

int cmd_curve(const CurveArgs& a, std::ostream& out) {
  if (a.steps < 1) throw UsageError("--steps must be at least 1");
  std::vector<double> grid;
  grid.reserve(a.steps);
  for (std::size_t i = 0; i < a.steps; ++i) {
    grid.push_back(a.steps == 1 ? 0.0
                                : static_cast<double>(i) * a.t_max /
                                      static_cast<double>(a.steps - 1));
  }
  const auto csv = curve_to_csv(decay_curve(DecayModel(a.lambda, a.p), a.s, grid));
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file_atomic(a.out, csv);
  }
  return kOk;
}

struct SimulateArgs {
  std::string config;
  std::string graph;
  int days = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool audit = false;
  bool force = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg = a.config.empty() ? ScenarioConfig{} : scenario_from_json(read_file(a.config));
  if (a.days > 0) cfg.days = a.days;
  if (a.seed_set) cfg.seed = a.seed;
  std::optional<DelayedGraph> graph;
  if (!a.graph.empty()) graph.emplace(graph_from_json(read_file(a.graph)));

  const fs::path dir = a.out.empty() ? default_out_dir("simulation") : fs::path(a.out);
  const fs::path trace_path = dir / "trace.jsonl";
  const fs::path data_path = dir / "dataset.jsonl";
  refuse_overwrite(trace_path, a.force);
  refuse_overwrite(data_path, a.force);

  const auto result = run_scenario(cfg, graph ? &*graph : nullptr);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  write_file_atomic(trace_path, trace_to_jsonl(result.trace));
  write_file_atomic(data_path, dataset_to_jsonl(result.dataset));
  out << "simulated " << cfg.days << " days: " << result.stats.transmissions
      << " transmissions, " << result.stats.suppressed << " suppressed\n";

  if (a.audit) {
    if (!no_heartbeat_audit(result.trace)) {
      err << "reactivity audit failed: trace contains an unprovoked transmission\n";
      return kCheckFailed;
    }
    out << "reactivity audit passed\n";
  }
  return kOk;
}

struct QueryArgs {
  std::string graph;
  std::string target = "sprinkler";
  std::string parent = "humidity";
  bool value = true;
  std::string delay = "0";
};

int cmd_query(const QueryArgs& a, std::ostream& out) {
  const DelayedGraph g = a.graph.empty() ? sprinkler_graph() : graph_from_json(read_file(a.graph));
  const double p = query_with_delay(g, a.target, a.parent, a.value, parse_duration_hours(a.delay));
  out << format_number(p) << "\n";
  return kOk;
}

int cmd_report(ReportOptions options, std::ostream& out) {
  const auto result = run_report(options);
  out << result.to_text();
  bool failed = false;
  for (const auto& c : result.checks) failed = failed || c.verdict == Verdict::fail;
  return failed ? kCheckFailed : kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Staleness-aware inference toolkit: delayed observations, decay-rate posteriors, "
               "reactive network simulation"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a sprinkler dataset (JSON lines)");
  gen_cmd->add_option("--case", gen.which, "Reference case 1, 2, 3 or custom")
      ->check(CLI::IsMember({"1", "2", "3", "custom"}));
  gen_cmd->add_option("--p-noon", gen.p_noon, "P(on at noon), custom case")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--p-night", gen.p_night, "P(on at midnight), custom case")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--n", gen.n, "Number of records")->check(CLI::PositiveNumber);
  auto* gen_seed = gen_cmd->add_option("--seed", gen.seed, "Seed (defaults to the case's seed)");
  gen_cmd->add_option("--out", gen.out, "Output file")->required();
  gen_cmd->add_flag("--force", gen.force, "Overwrite an existing file");

  InferArgs infer;
  auto* infer_cmd = app.add_subcommand("infer", "Posterior over the decay rate");
  infer_cmd->add_option("--data", infer.data, "Dataset (JSON lines)")->required();
  infer_cmd->add_option("--backend", infer.backend, "is or oracle")
      ->check(CLI::IsMember({"is", "oracle"}));
  infer_cmd->add_option("--particles", infer.particles, "Importance-sampling particles");
  infer_cmd->add_option("--seed", infer.seed, "Sampler seed");
  infer_cmd->add_option("--grid", infer.grid, "Oracle grid points");
  infer_cmd->add_option("--lambda-max", infer.lambda_max, "Upper bound of the uniform prior");
  infer_cmd->add_option("--p", infer.humidity_p, "Humidity prior probability");
  infer_cmd->add_option("--threads", infer.threads, "Sampler threads (0 = all cores)");
  infer_cmd->add_option("--posterior", infer.posterior_csv, "Write lambda,weight CSV");
  infer_cmd->add_option("--histogram", infer.histogram_csv, "Write 50-bin histogram CSV");
  infer_cmd->add_option("--summary", infer.summary_json, "Write summary JSON (default stdout)");

  CurveArgs curve;
  auto* curve_cmd = app.add_subcommand("curve", "Decay curve of a binary observation (CSV)");
  curve_cmd->add_option("--lambda", curve.lambda, "Decay rate per hour");
  curve_cmd->add_option("--p", curve.p, "Marginal probability");
  curve_cmd->add_option("--s", curve.s, "Observed value (true/false)");
  curve_cmd->add_option("--t-max", curve.t_max, "Last time point in hours")
      ->check(CLI::NonNegativeNumber);
  curve_cmd->add_option("--steps", curve.steps, "Number of evenly spaced points");
  curve_cmd->add_option("--out", curve.out, "Output file (default stdout)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the sensor/actuator network simulator");
  sim_cmd->add_option("--config", sim.config, "Scenario JSON");
  sim_cmd->add_option("--graph", sim.graph, "Graph JSON replacing the scenario's own graph");
  sim_cmd->add_option("--days", sim.days, "Override the number of days");
  auto* sim_seed = sim_cmd->add_option("--seed", sim.seed, "Override the scenario seed");
  sim_cmd->add_option("--out", sim.out, "Output directory for trace.jsonl and dataset.jsonl");
  sim_cmd->add_flag("--audit-reactive", sim.audit, "Fail if the trace has unprovoked sends");
  sim_cmd->add_flag("--force", sim.force, "Overwrite existing outputs");

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "P(target on) given a delayed parent observation");
  query_cmd->add_option("--graph", query.graph, "Graph JSON (default: sprinkler model)");
  query_cmd->add_option("--target", query.target, "Target variable");
  query_cmd->add_option("--parent", query.parent, "Observed parent variable");
  query_cmd->add_option("--value", query.value, "Observed value (true/false)");
  query_cmd->add_option("--delay", query.delay, "Observation age, e.g. 20min or 10h");

  ReportOptions report;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Reproduce the reference experiment");
  report_cmd->add_option("--out", report_out, "Output directory");
  report_cmd->add_option("--particles", report.particles, "Importance-sampling particles");
  report_cmd->add_option("--seed", report.sampler_seed, "Sampler base seed");
  report_cmd->add_option("--grid", report.grid_size, "Oracle grid points");
  report_cmd->add_option("--threads", report.workers, "Sampler threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) {
      gen.seed_set = gen_seed->count() > 0;
      return cmd_gen(gen, out);
    }
    if (*infer_cmd) return cmd_infer(infer, out);
    if (*curve_cmd) return cmd_curve(curve, out);
    if (*sim_cmd) {
      sim.seed_set = sim_seed->count() > 0;
      return cmd_simulate(sim, out, err);
    }
    if (*query_cmd) return cmd_query(query, out);
    if (*report_cmd) {
      report.out_dir = report_out.empty() ? default_out_dir("report") : fs::path(report_out);
      return cmd_report(report, out);
    }
  } catch (const DegeneracyError& e) {
    err << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace stale::cli

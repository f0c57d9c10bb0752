#include "stale/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace stale {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("malformed ") + what + ": " + e.what());
  }
}

template <class T>
T field(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) throw IoError(std::string(what) + " lacks \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw IoError(std::string(what) + " has a mistyped \"" + key + "\"");
  }
}

double number_field(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) throw IoError(std::string(what) + " lacks \"" + key + "\"");
  if (!it->is_number()) throw IoError(std::string(what) + " has a non-numeric \"" + key + "\"");
  return it->get<double>();
}

template <class T>
void maybe(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw IoError(std::string("scenario has a mistyped \"") + key + "\"");
    }
  }
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) fn(line);
    start = end + 1;
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_duration_hours(std::string_view text) {
  auto first = text.find_first_not_of(' ');
  if (first == std::string_view::npos) throw std::invalid_argument("empty duration");
  text.remove_prefix(first);
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc()) {
    throw std::invalid_argument("duration '" + std::string(text) + "' is not a number");
  }
  std::string_view unit(res.ptr, text.data() + text.size() - res.ptr);
  double hours;
  if (unit.empty() || unit == "h" || unit == "hour" || unit == "hours") {
    hours = value;
  } else if (unit == "m" || unit == "min" || unit == "mins" || unit == "minutes") {
    hours = value / 60.0;
  } else if (unit == "s" || unit == "sec") {
    hours = value / 3600.0;
  } else {
    throw std::invalid_argument("unknown duration unit '" + std::string(unit) + "'");
  }
  if (!(hours >= 0.0) || std::isinf(hours)) {
    throw std::invalid_argument("durations must be finite and non-negative");
  }
  return hours;
}

std::string encode_event(const StampedEvent& e) {
  ojson j;
  j["source_id"] = e.source_id;
  j["variable"] = e.variable;
  j["value"] = e.value;
  j["delay_at_arrival_h"] = e.delay_at_arrival_h;
  j["arrival_local_time_h"] = e.arrival_local_time_h;
  return j.dump();
}

namespace {

StampedEvent event_from(const json& j) {
  StampedEvent e;
  e.source_id = field<std::string>(j, "source_id", "event");
  e.variable = field<std::string>(j, "variable", "event");
  e.value = field<bool>(j, "value", "event");
  e.delay_at_arrival_h = number_field(j, "delay_at_arrival_h", "event");
  e.arrival_local_time_h = number_field(j, "arrival_local_time_h", "event");
  if (!(e.delay_at_arrival_h >= 0.0)) throw IoError("event delay must be non-negative");
  return e;
}

}  // namespace

StampedEvent decode_event(std::string_view line) {
  return event_from(parse_json(line, "event"));
}

std::string encode_record(const SprinklerRecord& r) {
  ojson j;
  j["s_noon"] = r.s_noon;
  j["s_night"] = r.s_night;
  return j.dump();
}

SprinklerRecord decode_record(std::string_view line) {
  const json j = parse_json(line, "record");
  return {field<bool>(j, "s_noon", "record"), field<bool>(j, "s_night", "record")};
}

std::string encode_trace_entry(const TraceEntry& entry) {
  if (const auto* e = std::get_if<StampedEvent>(&entry)) return encode_event(*e);
  ojson j;
  if (const auto* m = std::get_if<MeasurementRecord>(&entry)) {
    j["t_h"] = m->t_h;
    j["node"] = m->node;
    j["variable"] = m->variable;
    j["measured"] = m->value;
  } else {
    const auto& q = std::get<QueryRecord>(entry);
    j["t_h"] = q.t_h;
    j["node"] = q.node;
    j["decision"] = q.decision;
  }
  return j.dump();
}

TraceEntry decode_trace_entry(std::string_view line) {
  const json j = parse_json(line, "trace line");
  if (j.contains("delay_at_arrival_h")) return event_from(j);
  if (j.contains("measured")) {
    return MeasurementRecord{number_field(j, "t_h", "measurement"),
                             field<std::string>(j, "node", "measurement"),
                             field<std::string>(j, "variable", "measurement"),
                             field<bool>(j, "measured", "measurement")};
  }
  if (j.contains("decision")) {
    return QueryRecord{number_field(j, "t_h", "query"), field<std::string>(j, "node", "query"),
                       field<bool>(j, "decision", "query")};
  }
  throw IoError("unrecognized trace line");
}

std::string dataset_to_jsonl(std::span<const SprinklerRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += encode_record(r);
    out += '\n';
  }
  return out;
}

std::vector<SprinklerRecord> dataset_from_jsonl(std::string_view text) {
  std::vector<SprinklerRecord> out;
  for_each_line(text, [&](std::string_view line) { out.push_back(decode_record(line)); });
  return out;
}

std::string trace_to_jsonl(std::span<const TraceEntry> trace) {
  std::string out;
  for (const auto& e : trace) {
    out += encode_trace_entry(e);
    out += '\n';
  }
  return out;
}

std::vector<TraceEntry> trace_from_jsonl(std::string_view text) {
  std::vector<TraceEntry> out;
  for_each_line(text, [&](std::string_view line) { out.push_back(decode_trace_entry(line)); });
  return out;
}

DelayedGraph graph_from_json(std::string_view text) {
  const json j = parse_json(text, "graph");
  if (!j.is_object() || !j.contains("variables")) throw IoError("graph lacks \"variables\"");
  std::vector<VariableSpec> vars;
  for (const auto& v : j.at("variables")) {
    vars.push_back({field<std::string>(v, "name", "variable"),
                    {number_field(v, "bernoulli_p", "variable")}});
  }
  std::vector<DelayEdge> edges;
  if (auto it = j.find("edges"); it != j.end()) {
    for (const auto& e : *it) {
      edges.push_back(DelayEdge{
          field<std::string>(e, "from", "edge"), field<std::string>(e, "to", "edge"),
          GammaPrior{number_field(e, "gamma_shape", "edge"),
                     number_field(e, "gamma_scale_minutes", "edge") / 60.0},
          DecayModel(number_field(e, "lambda_delta", "edge"), number_field(e, "marginal_p", "edge")),
          AffineConditional{number_field(e, "conditional_a", "edge"),
                            number_field(e, "conditional_b", "edge")}});
    }
  }
  return DelayedGraph(std::move(vars), std::move(edges));
}

std::string graph_to_json(const DelayedGraph& graph) {
  ojson j;
  j["variables"] = ojson::array();
  for (const auto& v : graph.variables()) {
    ojson o;
    o["name"] = v.name;
    o["bernoulli_p"] = v.prior.p;
    j["variables"].push_back(o);
  }
  j["edges"] = ojson::array();
  for (const auto& e : graph.edges()) {
    ojson o;
    o["from"] = e.from;
    o["to"] = e.to;
    o["gamma_shape"] = e.delay_prior.shape;
    o["gamma_scale_minutes"] = e.delay_prior.scale_h * 60.0;
    o["lambda_delta"] = e.decay.lambda_delta();
    o["marginal_p"] = e.decay.marginal_p();
    o["conditional_a"] = e.conditional.a;
    o["conditional_b"] = e.conditional.b;
    j["edges"].push_back(o);
  }
  return j.dump(2) + "\n";
}

ScenarioConfig scenario_from_json(std::string_view text) {
  const json j = parse_json(text, "scenario");
  if (!j.is_object()) throw IoError("scenario must be a JSON object");
  ScenarioConfig c;
  auto& s = c.schedule;
  maybe(j, "humidity_prior_p", s.humidity_prior_p);
  if (auto it = j.find("morning_window_h"); it != j.end()) {
    maybe(*it, "lo", s.morning_window.lo_h);
    maybe(*it, "hi", s.morning_window.hi_h);
  }
  if (auto it = j.find("evening_window_h"); it != j.end()) {
    maybe(*it, "lo", s.evening_window.lo_h);
    maybe(*it, "hi", s.evening_window.hi_h);
  }
  maybe(j, "morning_query_time_h", s.morning_query_time_h);
  maybe(j, "evening_query_time_h", s.evening_query_time_h);
  maybe(j, "morning_humidity", s.morning_humidity);
  maybe(j, "evening_humidity", s.evening_humidity);
  maybe(j, "lambda_delta", c.lambda_delta);
  maybe(j, "marginal_p", c.marginal_p);
  maybe(j, "epsilon", c.epsilon);
  if (auto it = j.find("latency"); it != j.end()) {
    std::string mode = "gamma";
    maybe(*it, "mode", mode);
    if (mode == "gamma") {
      c.latency_mode = LatencyMode::gamma;
    } else if (mode == "zero") {
      c.latency_mode = LatencyMode::zero;
    } else {
      throw IoError("latency mode must be \"gamma\" or \"zero\"");
    }
    maybe(*it, "shape", c.latency_shape);
    if (auto sc = it->find("scale_minutes"); sc != it->end()) {
      double minutes = 0.0;
      maybe(*it, "scale_minutes", minutes);
      c.latency_scale_h = minutes / 60.0;
    }
  }
  if (auto it = j.find("estimate"); it != j.end()) {
    std::string mode = "truth";
    maybe(*it, "mode", mode);
    if (mode == "truth") {
      c.estimate_mode = EstimateMode::truth;
    } else if (mode == "fixed") {
      c.estimate_mode = EstimateMode::fixed;
    } else {
      throw IoError("estimate mode must be \"truth\" or \"fixed\"");
    }
    maybe(*it, "fixed_h", c.fixed_estimate_h);
  }
  maybe(j, "sensor_skew_h", c.sensor_skew_h);
  maybe(j, "actuator_skew_h", c.actuator_skew_h);
  maybe(j, "days", c.days);
  maybe(j, "seed", c.seed);
  maybe(j, "sensor_id", c.sensor_id);
  maybe(j, "actuator_id", c.actuator_id);
  maybe(j, "sensor_variable", c.sensor_variable);
  maybe(j, "actuator_variable", c.actuator_variable);
  return c;
}

std::string scenario_to_json(const ScenarioConfig& c) {
  const auto& s = c.schedule;
  ojson j;
  j["humidity_prior_p"] = s.humidity_prior_p;
  j["morning_window_h"] = {{"lo", s.morning_window.lo_h}, {"hi", s.morning_window.hi_h}};
  j["evening_window_h"] = {{"lo", s.evening_window.lo_h}, {"hi", s.evening_window.hi_h}};
  j["morning_query_time_h"] = s.morning_query_time_h;
  j["evening_query_time_h"] = s.evening_query_time_h;
  j["morning_humidity"] = s.morning_humidity;
  j["evening_humidity"] = s.evening_humidity;
  j["lambda_delta"] = c.lambda_delta;
  j["marginal_p"] = c.marginal_p;
  j["epsilon"] = c.epsilon;
  j["latency"] = {{"mode", c.latency_mode == LatencyMode::gamma ? "gamma" : "zero"},
                  {"shape", c.latency_shape},
                  {"scale_minutes", c.latency_scale_h * 60.0}};
  j["estimate"] = {{"mode", c.estimate_mode == EstimateMode::truth ? "truth" : "fixed"},
                   {"fixed_h", c.fixed_estimate_h}};
  j["sensor_skew_h"] = c.sensor_skew_h;
  j["actuator_skew_h"] = c.actuator_skew_h;
  j["days"] = c.days;
  j["seed"] = c.seed;
  j["sensor_id"] = c.sensor_id;
  j["actuator_id"] = c.actuator_id;
  j["sensor_variable"] = c.sensor_variable;
  j["actuator_variable"] = c.actuator_variable;
  return j.dump(2) + "\n";
}

std::string curve_to_csv(std::span<const CurvePoint> curve) {
  std::string out = "t,probability\n";
  for (const auto& pt : curve) {
    out += format_number(pt.t_h) + "," + format_number(pt.probability) + "\n";
  }
  return out;
}

std::string posterior_to_csv(const PosteriorResult& result) {
  std::string out = "lambda,weight\n";
  for (std::size_t i = 0; i < result.support.size(); ++i) {
    out += format_number(result.support[i]) + "," + format_number(result.weights[i]) + "\n";
  }
  return out;
}

std::string histogram_to_csv(std::span<const HistogramBin> bins) {
  std::string out = "bin_lo,bin_hi,mass\n";
  for (const auto& b : bins) {
    out += format_number(b.lo) + "," + format_number(b.hi) + "," + format_number(b.mass) + "\n";
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place");
  }
}

}  // namespace stale

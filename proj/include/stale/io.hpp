#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stale/clock.hpp"
#include "stale/decay.hpp"
#include "stale/graph.hpp"
#include "stale/inference.hpp"
#include "stale/simnet.hpp"

namespace stale {

/// File or format problem in an input or output.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to the same double.
std::string format_number(double v);

/// Parses "20min", "1.5h", "90m" or a bare number of hours into hours.
double parse_duration_hours(std::string_view text);

// One JSON object per line, keys in a fixed order.
std::string encode_event(const StampedEvent& event);
StampedEvent decode_event(std::string_view line);

std::string encode_record(const SprinklerRecord& record);
SprinklerRecord decode_record(std::string_view line);

std::string encode_trace_entry(const TraceEntry& entry);
TraceEntry decode_trace_entry(std::string_view line);

std::string dataset_to_jsonl(std::span<const SprinklerRecord> records);
std::vector<SprinklerRecord> dataset_from_jsonl(std::string_view text);
std::string trace_to_jsonl(std::span<const TraceEntry> trace);
std::vector<TraceEntry> trace_from_jsonl(std::string_view text);

/// {"variables": [{name, bernoulli_p}], "edges": [{from, to, gamma_shape,
/// gamma_scale_minutes, lambda_delta, marginal_p, conditional_a, conditional_b}]}
DelayedGraph graph_from_json(std::string_view text);
std::string graph_to_json(const DelayedGraph& graph);

/// Every field is optional and defaults to ScenarioConfig's defaults.
ScenarioConfig scenario_from_json(std::string_view text);
std::string scenario_to_json(const ScenarioConfig& config);

std::string curve_to_csv(std::span<const CurvePoint> curve);
std::string posterior_to_csv(const PosteriorResult& result);
std::string histogram_to_csv(std::span<const HistogramBin> bins);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace stale

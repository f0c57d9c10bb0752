#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "stale/clock.hpp"
#include "stale/graph.hpp"
#include "stale/inference.hpp"

namespace stale {

enum class NodeRole { sensor, actuator };

/// Notify dependents only when the value moved by more than epsilon.
struct ChangePolicy {
  double epsilon = 0.0;
};

enum class Propagation { notify, suppress };

struct SimNode {
  std::string id;
  NodeRole role = NodeRole::sensor;
  double skew_h = 0.0;
  std::optional<double> last_notified;
};

/// Notifies iff nothing was sent yet or |new - last_notified| > epsilon.
/// last_notified only moves on notify.
Propagation propagate_on_change(SimNode& node, double new_value_prob, const ChangePolicy& policy);

// Trace entries. Deliveries are the StampedEvent as held by the receiver.
struct MeasurementRecord {
  double t_h = 0.0;
  std::string node;
  std::string variable;
  bool value = false;

  bool operator==(const MeasurementRecord&) const = default;
};

struct QueryRecord {
  double t_h = 0.0;
  std::string node;
  bool decision = false;

  bool operator==(const QueryRecord&) const = default;
};

using TraceEntry = std::variant<MeasurementRecord, StampedEvent, QueryRecord>;

/// Time-ordered pending work; ties leave in insertion order.
template <class Payload>
class SimEventQueue {
 public:
  void push(double t_h, Payload payload) {
    heap_.push(Item{t_h, next_seq_++, std::move(payload)});
  }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double next_time() const { return heap_.top().t_h; }

  std::pair<double, Payload> pop() {
    Item top = heap_.top();
    heap_.pop();
    return {top.t_h, std::move(top.payload)};
  }

 private:
  struct Item {
    double t_h;
    std::uint64_t seq;
    Payload payload;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.t_h != b.t_h) return a.t_h > b.t_h;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Item, std::vector<Item>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

enum class LatencyMode {
  gamma,  ///< sampled from the edge's delay prior
  zero,   ///< instantaneous delivery; matches the windowed generative query
};

enum class EstimateMode {
  truth,  ///< the sender knows the sampled latency
  fixed,  ///< a constant estimate, to study mis-estimation
};

struct ScenarioConfig {
  /// Measurement windows, query times and humidity pattern.
  GenerativeConfig schedule;
  double lambda_delta = 0.25;
  double marginal_p = 0.2;
  double epsilon = 0.0;
  LatencyMode latency_mode = LatencyMode::gamma;
  double latency_shape = 9.0;
  double latency_scale_h = 10.0 / 60.0;
  EstimateMode estimate_mode = EstimateMode::truth;
  double fixed_estimate_h = 0.0;
  double sensor_skew_h = 0.0;
  double actuator_skew_h = 0.0;
  int days = 1000;
  std::uint64_t seed = 1;
  std::string sensor_id = "humidity-sensor";
  std::string actuator_id = "sprinkler-actuator";
  std::string sensor_variable = "humidity";
  std::string actuator_variable = "sprinkler";

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// The two-node graph a scenario runs on: the sensor variable feeds the
/// actuator with conditional 1 - h*.
DelayedGraph scenario_graph(const ScenarioConfig& config);

struct DeliveryAudit {
  double sampled_latency_h;
  double delay_at_arrival_h;
};

struct QueryAudit {
  double query_sim_time_h;
  double measurement_sim_time_h;
  double evidence_delay_h;
};

struct SimStats {
  std::size_t measurements = 0;
  std::size_t transmissions = 0;
  std::size_t suppressed = 0;
  std::size_t deliveries = 0;
  std::size_t queries = 0;
  std::size_t queries_with_evidence = 0;
  std::size_t actuator_clock_reads = 0;
};

struct ScenarioResult {
  std::vector<TraceEntry> trace;
  std::vector<SprinklerRecord> dataset;
  std::vector<DeliveryAudit> deliveries;
  std::vector<QueryAudit> queries;
  SimStats stats;
};

/// Runs the sensor/actuator network for config.days days. The sensor
/// reacts to measurements, the actuator to deliveries and its query
/// schedule; nothing else is ever scheduled. When `graph` is null the
/// scenario_graph is used; otherwise it must contain the
/// sensor -> actuator edge.
ScenarioResult run_scenario(const ScenarioConfig& config, const DelayedGraph* graph = nullptr);

/// True iff every delivery in the trace can be matched one-to-one with an
/// earlier measurement (same source, variable and value) or an earlier
/// query issued at its source.
bool no_heartbeat_audit(const std::vector<TraceEntry>& trace);

}  // namespace stale

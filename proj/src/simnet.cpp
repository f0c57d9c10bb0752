#include "stale/simnet.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "stale/random.hpp"

namespace stale {

Propagation propagate_on_change(SimNode& node, double new_value_prob, const ChangePolicy& policy) {
  if (!(new_value_prob >= 0.0 && new_value_prob <= 1.0)) {
    throw std::invalid_argument("propagated value must be a probability");
  }
  if (!(policy.epsilon >= 0.0 && policy.epsilon <= 1.0)) {
    throw std::invalid_argument("change threshold must lie in [0, 1]");
  }
  if (node.last_notified && std::abs(new_value_prob - *node.last_notified) <= policy.epsilon) {
    return Propagation::suppress;
  }
  node.last_notified = new_value_prob;
  return Propagation::notify;
}

void ScenarioConfig::validate() const {
  schedule.validate();
  if (schedule.morning_query_time_h > 24.0 || schedule.evening_query_time_h > 24.0) {
    throw std::invalid_argument("query times must fall within the day");
  }
  if (!(lambda_delta >= 0.0) || !std::isfinite(lambda_delta)) {
    throw std::invalid_argument("lambda must be finite and non-negative");
  }
  if (!(marginal_p >= 0.0 && marginal_p <= 1.0)) {
    throw std::invalid_argument("marginal probability must lie in [0, 1]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("change threshold must lie in [0, 1]");
  }
  if (!(latency_shape > 0.0) || !(latency_scale_h > 0.0)) {
    throw std::invalid_argument("latency shape and scale must be positive");
  }
  if (!(fixed_estimate_h >= 0.0)) {
    throw std::invalid_argument("fixed transmission estimate must be non-negative");
  }
  if (!std::isfinite(sensor_skew_h) || !std::isfinite(actuator_skew_h)) {
    throw std::invalid_argument("clock skew must be finite");
  }
  if (days < 1) throw std::invalid_argument("a scenario runs for at least one day");
  if (sensor_id == actuator_id) throw std::invalid_argument("node ids must be unique");
}

DelayedGraph scenario_graph(const ScenarioConfig& config) {
  return DelayedGraph(
      {{config.sensor_variable, {config.schedule.humidity_prior_p}},
       {config.actuator_variable, {0.5}}},
      {{config.sensor_variable, config.actuator_variable,
        GammaPrior{config.latency_shape, config.latency_scale_h},
        DecayModel(config.lambda_delta, config.marginal_p), AffineConditional{1.0, -1.0}}});
}

namespace {

enum class Slot { morning, evening };

struct Measure {
  Slot slot;
};
struct Arrive {
  InFlightEvent event;
  double sampled_latency_h;
  double measured_at_sim_h;
};
struct Query {
  Slot slot;
  int day;
};

using Work = std::variant<Measure, Arrive, Query>;

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, const DelayedGraph* graph) {
  config.validate();
  const DelayedGraph own = scenario_graph(config);
  const DelayedGraph& g = graph != nullptr ? *graph : own;
  const DelayEdge* edge = g.parent_edge(config.actuator_variable);
  if (edge == nullptr || edge->from != config.sensor_variable) {
    throw std::invalid_argument("graph lacks the edge " + config.sensor_variable + " -> " +
                                config.actuator_variable);
  }

  const auto& sched = config.schedule;
  Rng schedule_rng(derive_seed(config.seed, 1));
  Rng latency_rng(derive_seed(config.seed, 2));
  Rng decision_rng(derive_seed(config.seed, 3));

  ScenarioResult out;
  out.dataset.resize(static_cast<std::size_t>(config.days));

  SimEventQueue<Work> queue;
  for (int day = 0; day < config.days; ++day) {
    const double base = 24.0 * day;
    // Windows and query times are local to the node that acts on them.
    const double t_morning = base + schedule_rng.uniform(sched.morning_window.lo_h,
                                                         sched.morning_window.hi_h);
    const double t_evening = base + schedule_rng.uniform(sched.evening_window.lo_h,
                                                         sched.evening_window.hi_h);
    queue.push(t_morning - config.sensor_skew_h, Measure{Slot::morning});
    queue.push(t_evening - config.sensor_skew_h, Measure{Slot::evening});
    queue.push(base + sched.morning_query_time_h - config.actuator_skew_h,
               Query{Slot::morning, day});
    queue.push(base + sched.evening_query_time_h - config.actuator_skew_h,
               Query{Slot::evening, day});
  }

  ManualTime sim_time(queue.next_time());
  LocalClock sensor_clock([&] { return sim_time(); }, config.sensor_skew_h);
  LocalClock actuator_clock(
      [&] {
        ++out.stats.actuator_clock_reads;
        return sim_time();
      },
      config.actuator_skew_h);

  SimNode sensor{config.sensor_id, NodeRole::sensor, config.sensor_skew_h, std::nullopt};
  const ChangePolicy policy{config.epsilon};

  std::optional<StampedEvent> evidence;
  double evidence_measured_at = 0.0;

  while (!queue.empty()) {
    auto [t, work] = queue.pop();
    sim_time.set(t);

    if (const auto* m = std::get_if<Measure>(&work)) {
      const bool humid = m->slot == Slot::morning ? sched.morning_humidity : sched.evening_humidity;
      StampedEvent local = stamp_local(config.sensor_id, config.sensor_variable, humid, sensor_clock);
      ++out.stats.measurements;
      out.trace.emplace_back(MeasurementRecord{local.arrival_local_time_h, config.sensor_id,
                                               config.sensor_variable, humid});
      if (propagate_on_change(sensor, humid ? 1.0 : 0.0, policy) == Propagation::suppress) {
        ++out.stats.suppressed;
        continue;
      }
      const double latency = config.latency_mode == LatencyMode::gamma
                                 ? latency_rng.gamma(edge->delay_prior.shape,
                                                     edge->delay_prior.scale_h)
                                 : 0.0;
      const double estimate =
          config.estimate_mode == EstimateMode::truth ? latency : config.fixed_estimate_h;
      ++out.stats.transmissions;
      queue.push(t + latency, Arrive{begin_transmission(local, sensor_clock, estimate), latency, t});
    } else if (auto* a = std::get_if<Arrive>(&work)) {
      StampedEvent received = complete_transmission(std::move(a->event), actuator_clock);
      ++out.stats.deliveries;
      out.deliveries.push_back({a->sampled_latency_h, received.delay_at_arrival_h});
      out.trace.emplace_back(received);
      // Keep the observation that originated last; a late straggler never
      // replaces fresher evidence.
      const double origin = received.arrival_local_time_h - received.delay_at_arrival_h;
      if (!evidence ||
          origin >= evidence->arrival_local_time_h - evidence->delay_at_arrival_h) {
        evidence = std::move(received);
        evidence_measured_at = a->measured_at_sim_h;
      }
    } else {
      const auto& q = std::get<Query>(work);
      const double local_now = actuator_clock.now();
      double p_on;
      if (evidence) {
        p_on = query_delayed(g, config.actuator_variable, *evidence, actuator_clock);
        ++out.stats.queries_with_evidence;
        out.queries.push_back({t, evidence_measured_at, current_delay(*evidence, local_now)});
      } else {
        // Nothing heard yet: the parent is at its marginal.
        p_on = edge->conditional(edge->decay.marginal_p());
      }
      const bool decision = decision_rng.bernoulli(p_on);
      ++out.stats.queries;
      out.trace.emplace_back(QueryRecord{local_now, config.actuator_id, decision});
      auto& rec = out.dataset[static_cast<std::size_t>(q.day)];
      (q.slot == Slot::morning ? rec.s_noon : rec.s_night) = decision;
    }
  }
  return out;
}

bool no_heartbeat_audit(const std::vector<TraceEntry>& trace) {
  // Unmatched provocations per (node, variable, value); queries per node.
  std::map<std::tuple<std::string, std::string, bool>, std::size_t> measured;
  std::map<std::string, std::size_t> queried;
  for (const auto& entry : trace) {
    if (const auto* m = std::get_if<MeasurementRecord>(&entry)) {
      ++measured[{m->node, m->variable, m->value}];
    } else if (const auto* q = std::get_if<QueryRecord>(&entry)) {
      ++queried[q->node];
    } else {
      const auto& e = std::get<StampedEvent>(entry);
      auto it = measured.find({e.source_id, e.variable, e.value});
      if (it != measured.end() && it->second > 0) {
        --it->second;
        continue;
      }
      auto qi = queried.find(e.source_id);
      if (qi != queried.end() && qi->second > 0) {
        --qi->second;
        continue;
      }
      return false;
    }
  }
  return true;
}

}  // namespace stale

#include "stale/clock.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace stale {

LocalClock::LocalClock(TimeSource source, double skew_h)
    : source_(std::move(source)), skew_h_(skew_h) {
  if (!source_) throw std::invalid_argument("clock needs a time source");
  if (!std::isfinite(skew_h)) throw std::invalid_argument("clock skew must be finite");
}

double LocalClock::now() {
  const double t = source_() + skew_h_;
  if (t < last_) {
    throw std::logic_error("local clock went backwards");
  }
  last_ = t;
  return t;
}

StampedEvent stamp_local(std::string source_id, std::string variable, bool value,
                         LocalClock& clock) {
  return StampedEvent{std::move(source_id), std::move(variable), value, 0.0, clock.now()};
}

double current_delay(const StampedEvent& event, double local_now_h) {
  if (local_now_h < event.arrival_local_time_h) {
    throw std::logic_error("clock reads earlier than the event's arrival");
  }
  return event.delay_at_arrival_h + (local_now_h - event.arrival_local_time_h);
}

double current_delay(const StampedEvent& event, LocalClock& clock) {
  return current_delay(event, clock.now());
}

InFlightEvent begin_transmission(const StampedEvent& event, LocalClock& sender_clock,
                                 double transmission_estimate_h) {
  if (!(transmission_estimate_h >= 0.0) || std::isinf(transmission_estimate_h)) {
    throw std::invalid_argument("transmission estimate must be finite and non-negative");
  }
  return InFlightEvent{event.source_id, event.variable, event.value,
                       current_delay(event, sender_clock) + transmission_estimate_h};
}

StampedEvent complete_transmission(InFlightEvent in_flight, LocalClock& receiver_clock) {
  return StampedEvent{std::move(in_flight.source_id), std::move(in_flight.variable),
                      in_flight.value, in_flight.delay_h, receiver_clock.now()};
}

StampedEvent forward_event(const StampedEvent& event, LocalClock& sender_clock,
                           double transmission_estimate_h, LocalClock& receiver_clock) {
  return complete_transmission(
      begin_transmission(event, sender_clock, transmission_estimate_h), receiver_clock);
}

}  // namespace stale

#pragma once

#include <functional>
#include <limits>
#include <string>

namespace stale {

/// Monotone local time in hours, read from an injected time source.
///
/// A constant skew offset models a node whose clock is not synchronized
/// with the reference time. Reads must be serialized per node.
class LocalClock {
 public:
  using TimeSource = std::function<double()>;

  explicit LocalClock(TimeSource source, double skew_h = 0.0);

  /// Current local reading. Throws std::logic_error if the source moved
  /// backwards since the previous read.
  double now();

  double skew_h() const { return skew_h_; }

 private:
  TimeSource source_;
  double skew_h_;
  double last_ = -std::numeric_limits<double>::infinity();
};

/// Settable time source for tests and the simulator.
class ManualTime {
 public:
  explicit ManualTime(double start_h = 0.0) : now_h_(start_h) {}

  double operator()() const { return now_h_; }
  void set(double t_h) { now_h_ = t_h; }
  void advance(double dt_h) { now_h_ += dt_h; }

 private:
  double now_h_;
};

/// An event value plus the delay it had accumulated when it reached the
/// node holding it. The delay keeps growing with local time, but nothing
/// is stored for that: it is computed on read.
struct StampedEvent {
  std::string source_id;
  std::string variable;
  bool value = false;
  double delay_at_arrival_h = 0.0;
  double arrival_local_time_h = 0.0;

  bool operator==(const StampedEvent&) const = default;
};

/// A value leaving a node, carrying its delay at departure plus the
/// transmission estimate.
struct InFlightEvent {
  std::string source_id;
  std::string variable;
  bool value = false;
  double delay_h = 0.0;
};

StampedEvent stamp_local(std::string source_id, std::string variable, bool value,
                         LocalClock& clock);

/// delay_at_arrival + (now - arrival). Throws if the clock reads earlier
/// than the event's arrival.
double current_delay(const StampedEvent& event, LocalClock& clock);
double current_delay(const StampedEvent& event, double local_now_h);

InFlightEvent begin_transmission(const StampedEvent& event, LocalClock& sender_clock,
                                 double transmission_estimate_h);
StampedEvent complete_transmission(InFlightEvent in_flight, LocalClock& receiver_clock);

/// Hands the event to another node in one step: the carried delay is the
/// sender-side current delay plus the transmission estimate.
StampedEvent forward_event(const StampedEvent& event, LocalClock& sender_clock,
                           double transmission_estimate_h, LocalClock& receiver_clock);

}  // namespace stale

#include "stale/decay.hpp"

#include <cmath>
#include <stdexcept>

namespace stale {

DecayModel::DecayModel(double lambda_delta, double marginal_p)
    : lambda_delta_(lambda_delta), marginal_p_(marginal_p) {
  if (!(lambda_delta >= 0.0) || std::isinf(lambda_delta)) {
    throw std::invalid_argument("decay rate must be a finite non-negative number");
  }
  if (!(marginal_p >= 0.0 && marginal_p <= 1.0)) {
    throw std::invalid_argument("marginal probability must lie in [0, 1]");
  }
}

namespace {

void check_delay(double delay_h) {
  if (!(delay_h >= 0.0)) {
    throw std::invalid_argument("observation delay must be non-negative");
  }
}

// Weight still carried by the raw observation after delay_h hours.
double retention(const DecayModel& model, double delay_h) {
  check_delay(delay_h);
  return std::exp(-model.lambda_delta() * delay_h);
}

}  // namespace

double decayed_true_probability(const DecayModel& model, const BinaryObservation& obs) {
  const double keep = retention(model, obs.delay_h);
  const double s = obs.value ? 1.0 : 0.0;
  return keep * s + (1.0 - keep) * model.marginal_p();
}

double decayed_false_probability(const DecayModel& model, const BinaryObservation& obs) {
  return 1.0 - decayed_true_probability(model, obs);
}

double empirical_marginal(std::span<const TimelineSegment> timeline) {
  if (timeline.empty()) {
    throw std::invalid_argument("empirical marginal of an empty timeline");
  }
  double on = 0.0;
  double total = 0.0;
  for (const auto& seg : timeline) {
    if (!(seg.duration_h > 0.0) || std::isinf(seg.duration_h)) {
      throw std::invalid_argument("timeline segments need a positive finite duration");
    }
    if (seg.value) on += seg.duration_h;
    total += seg.duration_h;
  }
  return on / total;
}

std::vector<CurvePoint> decay_curve(const DecayModel& model, bool value,
                                    std::span<const double> t_grid_h) {
  std::vector<CurvePoint> out;
  out.reserve(t_grid_h.size());
  for (double t : t_grid_h) {
    out.push_back({t, decayed_true_probability(model, {value, t})});
  }
  return out;
}

}  // namespace stale

#pragma once

#include <span>
#include <utility>
#include <vector>

namespace stale {

/// Exponential fade of a binary observation towards a marginal probability.
///
/// A fresh observation is taken at face value; as its age grows the
/// probability that the observed variable is still true relaxes to
/// `marginal_p` with rate `lambda_delta` (1/hour).
class DecayModel {
 public:
  DecayModel(double lambda_delta, double marginal_p);

  double lambda_delta() const { return lambda_delta_; }
  double marginal_p() const { return marginal_p_; }

 private:
  double lambda_delta_;
  double marginal_p_;
};

struct BinaryObservation {
  bool value = false;
  double delay_h = 0.0;
};

struct TimelineSegment {
  bool value = false;
  double duration_h = 0.0;
};

struct CurvePoint {
  double t_h;
  double probability;
};

/// P(x* = true | x = obs.value, delay = obs.delay_h).
double decayed_true_probability(const DecayModel& model, const BinaryObservation& obs);

/// Complement of decayed_true_probability.
double decayed_false_probability(const DecayModel& model, const BinaryObservation& obs);

/// Time-weighted fraction of the timeline during which the variable was on.
double empirical_marginal(std::span<const TimelineSegment> timeline);

std::vector<CurvePoint> decay_curve(const DecayModel& model, bool value,
                                    std::span<const double> t_grid_h);

}  // namespace stale

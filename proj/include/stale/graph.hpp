#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stale/clock.hpp"
#include "stale/decay.hpp"

namespace stale {

struct BernoulliPrior {
  double p = 0.5;
};

/// Gamma(shape k, scale theta); scale in hours.
struct GammaPrior {
  double shape = 1.0;
  double scale_h = 1.0;

  double mean_h() const { return shape * scale_h; }
};

/// P(target = on | softened parent probability h) = a + b * h.
struct AffineConditional {
  double a = 0.0;
  double b = 1.0;

  double operator()(double h) const { return a + b * h; }
};

struct VariableSpec {
  std::string name;
  BernoulliPrior prior;
};

struct DelayEdge {
  std::string from;
  std::string to;
  GammaPrior delay_prior;
  DecayModel decay;
  AffineConditional conditional;
};

/// Immutable, validated delayed graphical model: binary variables with
/// Bernoulli priors, joined by edges that carry a delay distribution and
/// a decay model for the information flowing along them.
class DelayedGraph {
 public:
  /// Throws std::invalid_argument on duplicate names, dangling or
  /// self-loop edges, cycles, or a target with more than one parent.
  DelayedGraph(std::vector<VariableSpec> variables, std::vector<DelayEdge> edges);

  const std::vector<VariableSpec>& variables() const { return variables_; }
  const std::vector<DelayEdge>& edges() const { return edges_; }

  const VariableSpec& variable(const std::string& name) const;
  bool has_variable(const std::string& name) const;
  /// The single delayed parent edge of `target`, if any.
  const DelayEdge* parent_edge(const std::string& target) const;

 private:
  std::vector<VariableSpec> variables_;
  std::vector<DelayEdge> edges_;
  std::map<std::string, std::size_t> index_;
};

/// The sprinkler model: humidity ~ Ber(0.2) feeding a sprinkler that
/// turns on with probability 1 - h*, over an edge with Gamma(9, 10 min)
/// delay and the given decay rate.
DelayedGraph sprinkler_graph(double lambda_delta = 0.25, double humidity_p = 0.2);

/// Probability that `target` is on, given a possibly stale observation of
/// its parent held by a node whose clock is `clock`.
double query_delayed(const DelayedGraph& graph, const std::string& target,
                     const StampedEvent& evidence, LocalClock& clock);

/// Same query with the evidence age already known.
double query_with_delay(const DelayedGraph& graph, const std::string& target,
                        const std::string& parent, bool observed, double delay_h);

struct PriorSample {
  std::map<std::string, bool> values;
  /// One sampled delay per edge, in edge order.
  std::vector<double> edge_delays_h;

  bool operator==(const PriorSample&) const = default;
};

PriorSample prior_sample(const DelayedGraph& graph, std::uint64_t seed);

}  // namespace stale

#include "stale/graph.hpp"

#include <cmath>
#include <stdexcept>

#include "stale/random.hpp"

namespace stale {

DelayedGraph::DelayedGraph(std::vector<VariableSpec> variables, std::vector<DelayEdge> edges)
    : variables_(std::move(variables)), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.name.empty()) throw std::invalid_argument("variable name must not be empty");
    if (!(v.prior.p >= 0.0 && v.prior.p <= 1.0)) {
      throw std::invalid_argument("prior of '" + v.name + "' must lie in [0, 1]");
    }
    if (!index_.emplace(v.name, i).second) {
      throw std::invalid_argument("duplicate variable '" + v.name + "'");
    }
  }

  std::map<std::string, std::size_t> parents;
  for (const auto& e : edges_) {
    if (!has_variable(e.from) || !has_variable(e.to)) {
      throw std::invalid_argument("edge " + e.from + " -> " + e.to +
                                  " references an unknown variable");
    }
    if (e.from == e.to) throw std::invalid_argument("self-loop on '" + e.from + "'");
    if (!(e.delay_prior.shape > 0.0) || !(e.delay_prior.scale_h > 0.0)) {
      throw std::invalid_argument("edge delay prior needs positive shape and scale");
    }
    const double lo = e.conditional(0.0);
    const double hi = e.conditional(1.0);
    if (!(lo >= 0.0 && lo <= 1.0 && hi >= 0.0 && hi <= 1.0)) {
      throw std::invalid_argument("conditional of edge " + e.from + " -> " + e.to +
                                  " leaves [0, 1]");
    }
    if (++parents[e.to] > 1) {
      throw std::invalid_argument("'" + e.to + "' has more than one delayed parent");
    }
  }

  // Kahn's algorithm over the variable indices.
  std::vector<std::size_t> indegree(variables_.size(), 0);
  std::vector<std::vector<std::size_t>> children(variables_.size());
  for (const auto& e : edges_) {
    children[index_.at(e.from)].push_back(index_.at(e.to));
    ++indegree[index_.at(e.to)];
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < indegree.size(); ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto n = ready.back();
    ready.pop_back();
    ++visited;
    for (auto c : children[n]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  if (visited != variables_.size()) throw std::invalid_argument("graph contains a cycle");
}

bool DelayedGraph::has_variable(const std::string& name) const {
  return index_.contains(name);
}

const VariableSpec& DelayedGraph::variable(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("unknown variable '" + name + "'");
  return variables_[it->second];
}

const DelayEdge* DelayedGraph::parent_edge(const std::string& target) const {
  for (const auto& e : edges_) {
    if (e.to == target) return &e;
  }
  return nullptr;
}

DelayedGraph sprinkler_graph(double lambda_delta, double humidity_p) {
  return DelayedGraph(
      {{"humidity", {humidity_p}}, {"sprinkler", {0.5}}},
      {{"humidity", "sprinkler", GammaPrior{9.0, 10.0 / 60.0},
        DecayModel(lambda_delta, humidity_p), AffineConditional{1.0, -1.0}}});
}

double query_with_delay(const DelayedGraph& graph, const std::string& target,
                        const std::string& parent, bool observed, double delay_h) {
  graph.variable(target);
  graph.variable(parent);
  const DelayEdge* edge = graph.parent_edge(target);
  if (edge == nullptr || edge->from != parent) {
    throw std::invalid_argument("'" + parent + "' is not a delayed parent of '" + target + "'");
  }
  const double softened = decayed_true_probability(edge->decay, {observed, delay_h});
  return edge->conditional(softened);
}

double query_delayed(const DelayedGraph& graph, const std::string& target,
                     const StampedEvent& evidence, LocalClock& clock) {
  return query_with_delay(graph, target, evidence.variable, evidence.value,
                          current_delay(evidence, clock));
}

PriorSample prior_sample(const DelayedGraph& graph, std::uint64_t seed) {
  Rng rng(seed);
  PriorSample out;
  for (const auto& v : graph.variables()) {
    out.values.emplace(v.name, rng.bernoulli(v.prior.p));
  }
  out.edge_delays_h.reserve(graph.edges().size());
  for (const auto& e : graph.edges()) {
    out.edge_delays_h.push_back(rng.gamma(e.delay_prior.shape, e.delay_prior.scale_h));
  }
  return out;
}

}  // namespace stale

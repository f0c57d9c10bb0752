#pragma once

#include <cstdint>
#include <vector>

#include "stale/inference.hpp"

namespace stale {

/// Independent Bernoulli draws for the noon and midnight decisions.
struct CaseSpec {
  double p_noon = 0.5;
  double p_night = 0.5;
  std::size_t n_records = 1000;
  std::uint64_t seed = 0;
};

std::vector<SprinklerRecord> generate(const CaseSpec& spec);

/// The three reference experiments with their fixed seeds:
/// 1. never on at noon, always on at night;
/// 2. on at noon with probability 0.2 and at night with 0.9;
/// 3. on with probability 0.8 at both times.
CaseSpec canonical_case(int number);

}  // namespace stale

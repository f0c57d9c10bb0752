#include "stale/datagen.hpp"

#include <stdexcept>

#include "stale/random.hpp"

namespace stale {

std::vector<SprinklerRecord> generate(const CaseSpec& spec) {
  if (!(spec.p_noon >= 0.0 && spec.p_noon <= 1.0) ||
      !(spec.p_night >= 0.0 && spec.p_night <= 1.0)) {
    throw std::invalid_argument("case probabilities must lie in [0, 1]");
  }
  if (spec.n_records < 1) throw std::invalid_argument("a case needs at least one record");

  Rng rng(spec.seed);
  std::vector<SprinklerRecord> out;
  out.reserve(spec.n_records);
  for (std::size_t i = 0; i < spec.n_records; ++i) {
    SprinklerRecord r;
    r.s_noon = rng.bernoulli(spec.p_noon);
    r.s_night = rng.bernoulli(spec.p_night);
    out.push_back(r);
  }
  return out;
}

CaseSpec canonical_case(int number) {
  switch (number) {
    case 1: return {0.0, 1.0, 1000, 20190101};
    case 2: return {0.2, 0.9, 1000, 20190102};
    case 3: return {0.8, 0.8, 1000, 20190103};
    default: throw std::invalid_argument("canonical cases are numbered 1 to 3");
  }
}

}  // namespace stale

#pragma once

#include <cstdint>
#include <utility>

namespace obliqua::rng {

// Counter-based stream: every draw is a pure function of
// (seed, path_id, stream, step). Parallel scheduling cannot change results;
// this keying is part of the output contract, not a library choice.
struct Counter {
  std::uint64_t seed = 0;
  std::uint64_t path_id = 0;
  std::uint64_t stream = 0;

  double uniform(std::uint64_t step) const;              // in (0, 1]
  std::pair<double, double> gauss_pair(std::uint64_t step) const;
  double exponential(std::uint64_t step) const;          // rate 1
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace obliqua::rng

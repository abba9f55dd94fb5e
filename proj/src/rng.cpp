#include "obliqua/rng.hpp"

#include <cmath>

namespace obliqua::rng {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t hash_key(const Counter& c, std::uint64_t step, std::uint64_t lane) {
  std::uint64_t h = mix64(c.seed);
  h = mix64(h ^ mix64(c.path_id + 0x1000000000000001ull));
  h = mix64(h ^ mix64(c.stream + 0x2000000000000003ull));
  h = mix64(h ^ mix64(step + 0x3000000000000005ull));
  h = mix64(h ^ lane);
  return h;
}

double to_unit(std::uint64_t h) {
  // (0, 1]: 53-bit mantissa, never exactly 0
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double Counter::uniform(std::uint64_t step) const {
  return to_unit(hash_key(*this, step, 0));
}

std::pair<double, double> Counter::gauss_pair(std::uint64_t step) const {
  double u1 = to_unit(hash_key(*this, step, 1));
  double u2 = to_unit(hash_key(*this, step, 2));
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * 3.14159265358979323846 * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

double Counter::exponential(std::uint64_t step) const {
  return -std::log(to_unit(hash_key(*this, step, 3)));
}

}  // namespace obliqua::rng

#include "dsgda/rng.hpp"

#include <cmath>
#include <numbers>

namespace dsgda {
namespace {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double to_open_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t index) const {
  std::uint64_t k = mix64(seed_);
  k = mix64(k ^ mix64(stream_ + 0x632be59bd9b4e019ULL));
  return mix64(k ^ mix64(index ^ 0x8cb92ba72f3d8dd7ULL));
}

double CounterRng::uniform(std::uint64_t index) const { return to_open_unit(bits(index)); }

double CounterRng::normal(std::uint64_t index) const {
  const std::uint64_t b = bits(index);
  const double u1 = to_open_unit(b);
  const double u2 = to_open_unit(mix64(b ^ 0xd1b54a32d192ed03ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dsgda

#include "zovr/core.hpp"

#include <algorithm>
#include <cmath>

namespace zovr {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RandomStream RandomStream::substream(std::string_view name) const {
  return RandomStream(splitmix64(seed_ ^ fnv1a(name)));
}

std::size_t RandomStream::uniform_index(std::size_t n) {
  if (n == 0) throw InvalidArgument("uniform_index: empty range");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

double RandomStream::normal() { return normal_(engine_); }

Vector RandomStream::normal_vector(Index d) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = normal_(engine_);
  return v;
}

std::int64_t ceil_count(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("ceil_count: non-finite value");
  const double nearest = std::round(value);
  if (std::abs(value - nearest) <= 1e-9 * std::max(1.0, std::abs(value)))
    return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(value));
}

}  // namespace zovr

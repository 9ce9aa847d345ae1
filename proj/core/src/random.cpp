#include "orl/random.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "orl/error.hpp"

namespace orl {

std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) noexcept {
  return mix64(mix64(base) ^ fnv1a64(stream));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(mix64(base) + mix64(index ^ 0x5851f42d4c957f2dULL));
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void sample_without_replacement(Rng& rng, std::size_t population, std::size_t count,
                                std::vector<std::size_t>& out) {
  if (count > population) {
    throw UsageError("cannot sample " + std::to_string(count) + " distinct items from " +
                     std::to_string(population));
  }
  out.clear();
  out.reserve(count);
  // Floyd's algorithm keeps the cost proportional to `count`.
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(count * 2);
  for (std::size_t j = population - count; j < population; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    std::size_t t = pick(rng);
    if (chosen.insert(t).second) {
      out.push_back(t);
    } else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
}

}  // namespace orl

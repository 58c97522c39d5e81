#pragma once

#include <cstdint>
#include <initializer_list>

namespace fairdiv::detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based key derivation: the same (seed, parts...) always yields the
// same key, independent of how work is scheduled.
constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p + 0x3c6ef372fe94f82bULL));
  return h;
}

// Uniform draw from [0, bound) keyed by `key`; unbiased via rejection.
constexpr std::uint64_t uniform_below(std::uint64_t key, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::uint64_t x = derive(key, {attempt});
    if (x <= limit) return x % bound;
  }
}

// Domain tags keep the streams for different purposes apart.
enum : std::uint64_t {
  kTagStep = 1,
  kTagOrder = 2,
  kTagSample = 3,
  kTagInstance = 4,
  kTagEntry = 5,
};

}  // namespace fairdiv::detail

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace holcus {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace detail

/// Derives an independent stream seed from a master seed and a path of
/// counters (instance, restart, evaluation, circuit...). The result depends
/// only on the inputs, so streams are stable under any execution order.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = detail::splitmix64(master);
  for (auto c : path)
    s = detail::splitmix64(s ^ detail::splitmix64(c + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

} // namespace holcus

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "batchbald/types.hpp"

namespace batchbald {

// All draws below are hand-rolled on top of the mt19937_64 bit stream.
// std::*_distribution is avoided on purpose: its output is
// implementation-defined, and identical results across standard libraries
// are part of the determinism contract.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One root seed flows through the whole artifact; every independent stream
// gets a seed derived from its path (e.g. {trial}, {round, step}, {step,
// candidate}). Mixing is splitmix64 over the running state and each leg.
inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(root);
  for (std::uint64_t leg : path) s = splitmix64(s ^ splitmix64(leg));
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  Scalar uniform01() {
    return static_cast<Scalar>(bits() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n) without modulo bias (Lemire's method).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    while (true) {
      std::uint64_t x = bits();
      unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
      auto lo = static_cast<std::uint64_t>(m);
      if (lo >= n || lo >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  // Categorical draw by CDF walk over c probabilities with stride between
  // them. Assumes the weights sum to ~1; the final class absorbs any
  // floating-point shortfall.
  Index categorical(const Scalar* p, Index c, Index stride = 1) {
    Scalar u = uniform01();
    Scalar acc = 0.0;
    for (Index y = 0; y < c; ++y) {
      acc += p[y * stride];
      if (u < acc) return y;
    }
    return c - 1;
  }

  // Standard normal via Box-Muller; both outputs used in turn.
  Scalar normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Scalar u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    Scalar u2 = uniform01();
    Scalar r = std::sqrt(-2.0 * std::log(u1));
    Scalar a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Gamma(alpha, 1) via Marsaglia-Tsang; alpha < 1 is boosted through
  // Gamma(alpha + 1) and a power of a uniform.
  Scalar gamma(Scalar alpha) {
    if (alpha < 1.0) {
      Scalar u = uniform01();
      while (u <= 0.0) u = uniform01();
      return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const Scalar d = alpha - 1.0 / 3.0;
    const Scalar cc = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      Scalar x = normal();
      Scalar v = 1.0 + cc * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      Scalar u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Symmetric Dirichlet row: normalized iid Gamma(concentration) draws.
  Vector dirichlet(Index c, Scalar concentration) {
    Vector g(c);
    for (Index y = 0; y < c; ++y) g[y] = gamma(concentration);
    Scalar s = g.sum();
    if (s <= 0.0) {
      // All draws underflowed (possible at tiny concentration); fall back
      // to a one-hot row at a uniformly drawn class.
      g.setZero();
      g[static_cast<Index>(uniform_index(static_cast<std::uint64_t>(c)))] = 1.0;
      return g;
    }
    return g / s;
  }

 private:
  std::mt19937_64 gen_;
  Scalar spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace batchbald

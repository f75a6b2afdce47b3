#pragma once

// Test-only cross-check for the coset enumerator. Cosets Gamma*M correspond
// to row lattices L = Z^2n M with L J' L^t = p^delta * (unimodular alternating),
// so we list every row HNF H with det H = p^(n delta) and H J' H^t = 0 mod p^delta.
// Knows nothing about columns, pairings or forced entries.

#include <cstdint>
#include <functional>
#include <vector>

#include "hecke/hecke_oracle.hpp"

namespace hecke::testing {

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

inline bool pairing_divisible(const IntMatrix& h, const IntMatrix& j, std::int64_t mu) {
  const IntMatrix g = h * j * h.transpose();
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      if (g(r, c) % mu != 0) return false;
  return true;
}

inline std::vector<IntMatrix> lattice_hnfs(int genus, std::int64_t p, int delta) {
  const int N = 2 * genus;
  const std::int64_t mu = ipow(p, delta);
  const IntMatrix J = adapted_J(genus);
  std::vector<IntMatrix> found;

  std::vector<int> exps(static_cast<std::size_t>(N));
  std::function<void(int, int)> diag = [&](int i, int remaining) {
    if (i == N) {
      if (remaining != 0) return;
      IntMatrix h(N, N);
      for (int k = 0; k < N; ++k) h(k, k) = ipow(p, exps[static_cast<std::size_t>(k)]);
      // above-diagonal slots in column-major order
      std::vector<std::pair<int, int>> slots;
      for (int c = 0; c < N; ++c)
        for (int r = 0; r < c; ++r)
          if (h(c, c) > 1) slots.emplace_back(r, c);
      std::function<void(std::size_t)> fill = [&](std::size_t s) {
        if (s == slots.size()) {
          if (pairing_divisible(h, J, mu)) found.push_back(h);
          return;
        }
        const auto [r, c] = slots[s];
        for (std::int64_t v = 0; v < h(c, c); ++v) {
          h(r, c) = v;
          fill(s + 1);
        }
        h(r, c) = 0;
      };
      fill(0);
      return;
    }
    for (int e = 0; e <= std::min(delta, remaining); ++e) {
      exps[static_cast<std::size_t>(i)] = e;
      diag(i + 1, remaining - e);
    }
  };
  diag(0, genus * delta);
  return found;
}

}  // namespace hecke::testing

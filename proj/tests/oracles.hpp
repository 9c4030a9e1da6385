#pragma once

// Brute-force reference computations, kept independent of the library code.

#include "interpkit/logic.hpp"

#include <random>
#include <vector>

namespace oracle {

using ik::Int;

// Cantor pairing by walking the diagonals (0,0),(1,0),(0,1),(2,0),...
inline auto diagonal_index(long x, long y) -> long {
  long idx = 0;
  for (long d = 0;; ++d)
    for (long j = 0; j <= d; ++j, ++idx)
      if (d - j == x && j == y) return idx;
}

inline auto diagonal_pair(long n) -> std::pair<long, long> {
  long idx = 0;
  for (long d = 0;; ++d)
    for (long j = 0; j <= d; ++j, ++idx)
      if (idx == n) return {d - j, j};
}

// Length-prefixed iterated pairing built from the diagonal walk.
inline auto tuple_code(const std::vector<long>& t) -> long {
  long m = t[0];
  for (std::size_t i = 1; i < t.size(); ++i) m = diagonal_index(m, t[i]);
  return diagonal_index(static_cast<long>(t.size()) - 1, m);
}

// Naive free reduction: delete the first cancelling pair until none is left.
inline auto naive_reduce(std::vector<int> w) -> std::vector<int> {
  for (bool again = true; again;) {
    again = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] == -w[i + 1]) {
        w.erase(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i) + 2);
        again = true;
        break;
      }
  }
  return w;
}

inline auto random_word(std::mt19937_64& rng, int rank, int maxlen, bool reduced = true) -> std::vector<int> {
  std::vector<int> w;
  int len = static_cast<int>(rng() % static_cast<unsigned>(maxlen + 1));
  while (static_cast<int>(w.size()) < len) {
    int a = static_cast<int>(rng() % static_cast<unsigned>(rank)) + 1;
    if (rng() % 2) a = -a;
    if (reduced && !w.empty() && w.back() == -a) continue;
    w.push_back(a);
  }
  return w;
}

}  // namespace oracle

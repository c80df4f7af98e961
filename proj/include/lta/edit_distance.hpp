#pragma once

#include <algorithm>
#include <cstddef>
#include <unordered_map>

#include "lta/grid.hpp"

namespace lta {

// Damerau-Levenshtein distance with unit-cost insertion, deletion,
// substitution and adjacent transposition (the unrestricted variant, so
// "ca" -> "abc" costs 2: transpose then insert). Symbols only need equality
// and std::hash. O(|a|*|b|) time via the last-occurrence dynamic program.
template <typename Seq>
std::size_t edit_distance(const Seq& a, const Seq& b) {
  using Symbol = typename Seq::value_type;
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  if (m == 0) return n;
  if (n == 0) return m;

  const std::size_t inf = m + n;  // exceeds any achievable distance
  Grid<std::size_t> d(m + 2, n + 2, 0);
  d.at(0, 0) = inf;
  for (std::size_t i = 0; i <= m; ++i) {
    d.at(i + 1, 0) = inf;
    d.at(i + 1, 1) = i;
  }
  for (std::size_t j = 0; j <= n; ++j) {
    d.at(0, j + 1) = inf;
    d.at(1, j + 1) = j;
  }

  std::unordered_map<Symbol, std::size_t> last_row;  // symbol -> last row seen in a
  for (std::size_t i = 1; i <= m; ++i) {
    std::size_t last_col = 0;  // last column where a[i-1] matched b
    for (std::size_t j = 1; j <= n; ++j) {
      const bool match = a[i - 1] == b[j - 1];
      std::size_t row1 = 0;
      if (auto it = last_row.find(b[j - 1]); it != last_row.end()) row1 = it->second;
      const std::size_t col1 = last_col;

      const std::size_t substitute = d.at(i, j) + (match ? 0 : 1);
      const std::size_t insert = d.at(i + 1, j) + 1;
      const std::size_t erase = d.at(i, j + 1) + 1;
      // Transpose a[row1-1] with b[col1-1], deleting/inserting what lies
      // between the two occurrences.
      const std::size_t transpose =
          (row1 > 0 && col1 > 0)
              ? d.at(row1 - 1 + 1, col1 - 1 + 1) + (i - row1 - 1) + 1 + (j - col1 - 1)
              : inf;

      d.at(i + 1, j + 1) = std::min({substitute, insert, erase, transpose});
      if (match) last_col = j;
    }
    last_row[a[i - 1]] = i;
  }
  return d.at(m + 1, n + 1);
}

}  // namespace lta

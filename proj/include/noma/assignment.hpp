#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace noma {

/// Exact max-weight perfect assignment on an n-by-n weight matrix, by the
/// O(n^3) shortest-augmenting-path method with dual potentials (the usual
/// Hungarian/Jonker-Volgenant formulation, run on negated weights).
/// Returns the column assigned to each row.
inline std::vector<int> max_weight_assignment(
    const std::vector<std::vector<double>>& weight) {
  const int n = static_cast<int>(weight.size());
  if (n == 0) return {};
  for (const auto& row : weight)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("max_weight_assignment: matrix not square");

  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; p[j] is the row matched to column j, p[0] the row being placed.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace noma

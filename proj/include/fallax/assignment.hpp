#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace fallax {

struct AssignmentResult {
  std::vector<int> row_to_col;  // row i assigned to column row_to_col[i]
  double cost = 0;
};

/// Exact minimum-cost perfect matching on a square cost matrix via the
/// shortest-augmenting-path method with dual potentials. O(n^3), handles
/// negative entries, deterministic.
inline AssignmentResult solve_assignment(const std::vector<std::vector<double>>& a) {
  const int n = static_cast<int>(a.size());
  AssignmentResult result;
  if (n == 0) return result;
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("solve_assignment: matrix must be square");

  const double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; p[j] = row matched to column j (0 = none)
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = a[static_cast<std::size_t>(i0 - 1)]
                            [static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }

  result.row_to_col.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    const int i = p[static_cast<std::size_t>(j)];
    if (i > 0) {
      result.row_to_col[static_cast<std::size_t>(i - 1)] = j - 1;
      result.cost += a[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
    }
  }
  return result;
}

}  // namespace fallax

#include "mvfuse/assignment.hpp"

#include <limits>

namespace mvfuse {

namespace {

// Shortest augmenting path Hungarian for rows <= cols, 1-based potentials.
std::vector<int> solve_wide(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
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
    } while (j0 != 0);
  }
  std::vector<int> rows(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) rows[p[j] - 1] = j - 1;
  }
  return rows;
}

}  // namespace

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) {
    return std::vector<int>(static_cast<std::size_t>(cost.rows()), -1);
  }
  if (cost.rows() <= cost.cols()) return solve_wide(cost);

  const std::vector<int> by_col = solve_wide(cost.transpose());
  std::vector<int> rows(static_cast<std::size_t>(cost.rows()), -1);
  for (std::size_t c = 0; c < by_col.size(); ++c) {
    if (by_col[c] >= 0) rows[static_cast<std::size_t>(by_col[c])] =
        static_cast<int>(c);
  }
  return rows;
}

double assignment_cost(const Eigen::MatrixXd& cost,
                       const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r) {
    if (assignment[r] >= 0) total += cost(static_cast<Eigen::Index>(r),
                                          assignment[r]);
  }
  return total;
}

}  // namespace mvfuse

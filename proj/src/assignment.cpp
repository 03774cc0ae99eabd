#include "flock/assignment.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "flock/errors.hpp"

namespace flock {

// Shortest-augmenting-path assignment with dual potentials (u, v).  Rows
// are inserted one at a time; each insertion relaxes column labels until
// an unmatched column is reached, then the path is unrolled.  Index 0 is
// a sentinel column holding the row currently being inserted.
std::vector<int> min_cost_assignment(const Matrix& cost) {
  if (cost.rows != cost.cols)
    throw ValidationError("assignment: cost matrix must be square");
  if (cost.rows < 1) throw ValidationError("assignment: empty cost matrix");
  for (double c : cost.a)
    if (!std::isfinite(c))
      throw ValidationError("assignment: cost matrix must be finite");

  const int n = cost.rows;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> row_of(static_cast<size_t>(n) + 1, 0);
  std::vector<int> prev(static_cast<size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    row_of[0] = i;
    int j0 = 0;
    std::vector<double> dist(static_cast<size_t>(n) + 1, inf);
    std::vector<bool> done(static_cast<size_t>(n) + 1, false);
    do {
      done[static_cast<size_t>(j0)] = true;
      int i0 = row_of[static_cast<size_t>(j0)];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (done[static_cast<size_t>(j)]) continue;
        double reduced = cost.at(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] -
                         v[static_cast<size_t>(j)];
        if (reduced < dist[static_cast<size_t>(j)]) {
          dist[static_cast<size_t>(j)] = reduced;
          prev[static_cast<size_t>(j)] = j0;
        }
        if (dist[static_cast<size_t>(j)] < delta) {
          delta = dist[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (done[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(row_of[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          dist[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[static_cast<size_t>(j0)] != 0);
    do {
      int j1 = prev[static_cast<size_t>(j0)];
      row_of[static_cast<size_t>(j0)] = row_of[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> match(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    match[static_cast<size_t>(row_of[static_cast<size_t>(j)]) - 1] = j - 1;
  return match;
}

double assignment_cost(const Matrix& cost) {
  auto match = min_cost_assignment(cost);
  double total = 0.0;
  for (int i = 0; i < cost.rows; ++i)
    total += cost.at(i, match[static_cast<size_t>(i)]);
  return total;
}

}  // namespace flock

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace flock {

/// Directed interaction graph on vertices 0..n-1.  An edge (j, i) means
/// agent j influences agent i; j is then a leader of i.  Self-loops are
/// rejected; duplicate edges collapse to one.
class Digraph {
 public:
  Digraph(int n, const std::vector<std::pair<int, int>>& edges);

  int vertex_count() const { return n_; }
  /// Leaders of i, sorted ascending.
  const std::vector<int>& leaders(int i) const;
  bool has_edge(int j, int i) const;
  /// All edges (j, i), sorted by (i, j).
  std::vector<std::pair<int, int>> edges() const;

 private:
  int n_ = 0;
  std::vector<std::vector<int>> leaders_;
};

/// Graph exchange text: a "digraph N" header line followed by one "j i"
/// edge pair per line, '#' starting a comment.  Throws ValidationError on
/// malformed input.
Digraph parse_digraph(const std::string& text);

/// Every edge (j, i) has j < i, and every vertex i > 0 has at least one
/// leader.  Hierarchical graphs are rooted at 0.
bool is_hierarchical(const Digraph& g);

/// root has no leaders and every other vertex is reachable from root.
bool is_rooted(const Digraph& g, int root = 0);

/// Union of the edge sets; all graphs must share the vertex count.
Digraph union_graph(const std::vector<Digraph>& gs);

/// BFS distances from the root along directed edges.  Requires the graph to
/// be rooted at `root`; depth is the largest distance.
struct LeaderDistances {
  std::vector<int> ell;
  int depth = 0;
};
LeaderDistances leader_distance(const Digraph& g, int root = 0);

/// Dense row-major matrix, just large enough for follower-coupling blocks.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  static Matrix zero(int r, int c) {
    return {r, c, std::vector<double>(static_cast<size_t>(r) * c, 0.0)};
  }
  static Matrix identity(int n);
  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return a[static_cast<size_t>(r) * cols + c];
  }
};

Matrix matmul(const Matrix& A, const Matrix& B);

/// Max absolute row sum.
double inf_norm(const Matrix& A);

/// Weighted norm |D A D^-1|_inf with D = diag(eps^ell(i)): the max over
/// rows i of sum_j |A_ij| * eps^(ell(i) - ell(j)).  Requires square A,
/// one ell entry per row, and eps in (0, 1).
double epsilon_norm(const Matrix& A, const std::vector<int>& ell, double eps);

/// Checks |P|_eps <= 1 - (1 - eps) * h * phi_m, with 1e-12 slack.
/// margin = bound - norm (negative when the bound fails).
struct ContractionCheck {
  bool ok = false;
  double norm = 0.0;
  double bound = 0.0;
  double margin = 0.0;
};
ContractionCheck verify_contraction(const Matrix& P,
                                    const std::vector<int>& ell, double eps,
                                    double h, double phi_m);

/// Maps step index t >= 0 to the index of the active graph.  Periodic
/// signals repeat a pattern forever; schedules are total only on
/// [0, length) and throw beyond it.
class SwitchingSignal {
 public:
  static SwitchingSignal periodic(std::vector<int> pattern);
  static SwitchingSignal schedule(std::vector<int> steps);

  int at(long t) const;
  bool periodic_signal() const { return periodic_; }
  /// Number of scheduled steps; -1 when periodic.
  long horizon() const;

 private:
  SwitchingSignal() = default;
  bool periodic_ = true;
  std::vector<int> seq_;
};

/// Union of the graphs active on steps [t1, t2) is rooted at `root`.
bool is_joint_rooted(const std::vector<Digraph>& gs,
                     const SwitchingSignal& signal, long t1, long t2,
                     int root = 0);

}  // namespace flock

#include "flock/topology.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <string>

#include "flock/errors.hpp"

namespace flock {

Digraph::Digraph(int n, const std::vector<std::pair<int, int>>& edges)
    : n_(n), leaders_(static_cast<size_t>(std::max(n, 0))) {
  if (n < 1) throw ValidationError("digraph: need at least one vertex");
  for (auto [j, i] : edges) {
    if (j < 0 || j >= n || i < 0 || i >= n)
      throw ValidationError("digraph: edge (" + std::to_string(j) + ", " +
                            std::to_string(i) + ") out of range");
    if (j == i)
      throw ValidationError("digraph: self-loop at vertex " +
                            std::to_string(i));
    leaders_[i].push_back(j);
  }
  for (auto& ls : leaders_) {
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  }
}

const std::vector<int>& Digraph::leaders(int i) const {
  if (i < 0 || i >= n_)
    throw ValidationError("digraph: vertex " + std::to_string(i) +
                          " out of range");
  return leaders_[i];
}

bool Digraph::has_edge(int j, int i) const {
  const auto& ls = leaders(i);
  return std::binary_search(ls.begin(), ls.end(), j);
}

std::vector<std::pair<int, int>> Digraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i)
    for (int j : leaders_[i]) out.emplace_back(j, i);
  return out;
}

bool is_hierarchical(const Digraph& g) {
  for (int i = 0; i < g.vertex_count(); ++i) {
    const auto& ls = g.leaders(i);
    if (i > 0 && ls.empty()) return false;
    for (int j : ls)
      if (j >= i) return false;
  }
  return true;
}

bool is_rooted(const Digraph& g, int root) {
  int n = g.vertex_count();
  if (root < 0 || root >= n)
    throw ValidationError("is_rooted: root out of range");
  if (!g.leaders(root).empty()) return false;
  // reachability along directed edges, root first
  std::vector<char> seen(n, 0);
  seen[root] = 1;
  std::deque<int> q{root};
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int i = 0; i < n; ++i) {
      if (seen[i] || !g.has_edge(u, i)) continue;
      seen[i] = 1;
      ++reached;
      q.push_back(i);
    }
  }
  return reached == n;
}

Digraph parse_digraph(const std::string& text) {
  std::vector<long> numbers;
  bool saw_header = false;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    size_t cursor = 0;
    auto blank = [&](size_t at) {
      return std::isspace(static_cast<unsigned char>(line[at])) != 0;
    };
    auto next_token = [&]() -> std::string {
      while (cursor < line.size() && blank(cursor)) ++cursor;
      size_t start = cursor;
      while (cursor < line.size() && !blank(cursor)) ++cursor;
      return line.substr(start, cursor - start);
    };
    for (std::string tok = next_token(); !tok.empty(); tok = next_token()) {
      if (!saw_header) {
        if (tok != "digraph")
          throw ValidationError(
              "digraph text: expected a 'digraph N' header line");
        saw_header = true;
        continue;
      }
      size_t used = 0;
      long value = 0;
      try {
        value = std::stol(tok, &used);
      } catch (const std::exception&) {
        throw ValidationError("digraph text: '" + tok +
                              "' is not a vertex number");
      }
      if (used != tok.size())
        throw ValidationError("digraph text: '" + tok +
                              "' is not a vertex number");
      numbers.push_back(value);
    }
  }
  if (!saw_header || numbers.empty())
    throw ValidationError("digraph text: expected a 'digraph N' header line");
  long n = numbers.front();
  if (n < 1)
    throw ValidationError("digraph text: vertex count must be positive");
  if ((numbers.size() - 1) % 2 != 0)
    throw ValidationError("digraph text: dangling vertex in an edge pair");
  std::vector<std::pair<int, int>> edges;
  for (size_t k = 1; k + 1 < numbers.size(); k += 2)
    edges.push_back({static_cast<int>(numbers[k]),
                     static_cast<int>(numbers[k + 1])});
  return Digraph(static_cast<int>(n), edges);
}

Digraph union_graph(const std::vector<Digraph>& gs) {
  if (gs.empty()) throw ValidationError("union_graph: no graphs");
  int n = gs[0].vertex_count();
  std::vector<std::pair<int, int>> edges;
  for (const auto& g : gs) {
    if (g.vertex_count() != n)
      throw ValidationError("union_graph: vertex counts differ");
    auto es = g.edges();
    edges.insert(edges.end(), es.begin(), es.end());
  }
  return Digraph(n, edges);
}

LeaderDistances leader_distance(const Digraph& g, int root) {
  if (!is_rooted(g, root))
    throw ValidationError("leader_distance: graph is not rooted at " +
                          std::to_string(root));
  int n = g.vertex_count();
  LeaderDistances out;
  out.ell.assign(n, -1);
  out.ell[root] = 0;
  std::deque<int> q{root};
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int i = 0; i < n; ++i) {
      if (out.ell[i] >= 0 || !g.has_edge(u, i)) continue;
      out.ell[i] = out.ell[u] + 1;
      q.push_back(i);
    }
  }
  out.depth = *std::max_element(out.ell.begin(), out.ell.end());
  return out;
}

Matrix Matrix::identity(int n) {
  Matrix m = zero(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  if (A.cols != B.rows) throw ValidationError("matmul: shape mismatch");
  Matrix C = Matrix::zero(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      double aik = A.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) C.at(i, j) += aik * B.at(k, j);
    }
  return C;
}

double inf_norm(const Matrix& A) {
  double best = 0.0;
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.cols; ++j) s += std::abs(A.at(i, j));
    best = std::max(best, s);
  }
  return best;
}

double epsilon_norm(const Matrix& A, const std::vector<int>& ell,
                    double eps) {
  if (A.rows != A.cols) throw ValidationError("epsilon_norm: matrix not square");
  if (static_cast<int>(ell.size()) != A.rows)
    throw ValidationError("epsilon_norm: need one distance per row");
  if (!(eps > 0.0) || !(eps < 1.0))
    throw ValidationError("epsilon_norm: eps must lie in (0, 1)");
  double best = 0.0;
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.cols; ++j) {
      double v = std::abs(A.at(i, j));
      if (v == 0.0) continue;
      s += v * std::pow(eps, ell[i] - ell[j]);
    }
    best = std::max(best, s);
  }
  return best;
}

ContractionCheck verify_contraction(const Matrix& P,
                                    const std::vector<int>& ell, double eps,
                                    double h, double phi_m) {
  if (!(h >= 0.0) || !std::isfinite(h))
    throw ValidationError("verify_contraction: h must be finite and >= 0");
  if (!(phi_m >= 0.0) || !std::isfinite(phi_m))
    throw ValidationError("verify_contraction: phi_m must be finite and >= 0");
  ContractionCheck out;
  out.norm = epsilon_norm(P, ell, eps);
  out.bound = 1.0 - (1.0 - eps) * h * phi_m;
  out.margin = out.bound - out.norm;
  out.ok = out.norm <= out.bound + 1e-12;
  return out;
}

SwitchingSignal SwitchingSignal::periodic(std::vector<int> pattern) {
  if (pattern.empty())
    throw ValidationError("switching signal: empty pattern");
  for (int g : pattern)
    if (g < 0) throw ValidationError("switching signal: negative graph index");
  SwitchingSignal s;
  s.periodic_ = true;
  s.seq_ = std::move(pattern);
  return s;
}

SwitchingSignal SwitchingSignal::schedule(std::vector<int> steps) {
  if (steps.empty())
    throw ValidationError("switching signal: empty schedule");
  for (int g : steps)
    if (g < 0) throw ValidationError("switching signal: negative graph index");
  SwitchingSignal s;
  s.periodic_ = false;
  s.seq_ = std::move(steps);
  return s;
}

int SwitchingSignal::at(long t) const {
  if (t < 0) throw ValidationError("switching signal: negative step index");
  if (periodic_) return seq_[static_cast<size_t>(t % seq_.size())];
  if (t >= static_cast<long>(seq_.size()))
    throw ValidationError("switching signal: step " + std::to_string(t) +
                          " beyond the schedule of length " +
                          std::to_string(seq_.size()));
  return seq_[static_cast<size_t>(t)];
}

long SwitchingSignal::horizon() const {
  return periodic_ ? -1 : static_cast<long>(seq_.size());
}

bool is_joint_rooted(const std::vector<Digraph>& gs,
                     const SwitchingSignal& signal, long t1, long t2,
                     int root) {
  if (gs.empty()) throw ValidationError("is_joint_rooted: no graphs");
  if (t1 >= t2)
    throw ValidationError("is_joint_rooted: need a non-empty window");
  std::vector<char> used(gs.size(), 0);
  for (long t = t1; t < t2; ++t) {
    int g = signal.at(t);
    if (g >= static_cast<int>(gs.size()))
      throw ValidationError("is_joint_rooted: signal index " +
                            std::to_string(g) + " has no graph");
    used[g] = 1;
  }
  std::vector<Digraph> active;
  for (size_t i = 0; i < gs.size(); ++i)
    if (used[i]) active.push_back(gs[i]);
  return is_rooted(union_graph(active), root);
}

}  // namespace flock

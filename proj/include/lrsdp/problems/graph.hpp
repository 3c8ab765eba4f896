#pragma once
#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lrsdp/core/types.hpp"

namespace lrsdp {

// Undirected simple graph on vertices 1..n. Edges are stored as ordered
// pairs (i < j), sorted lexicographically and deduplicated.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

// Normalize raw edge input: orient each pair as (small, large), reject
// self-loops and out-of-range endpoints, sort, deduplicate. The number of
// duplicates dropped is reported through `duplicates` when non-null.
inline Graph make_graph(int n, std::vector<std::pair<int, int>> raw,
                        long* duplicates = nullptr) {
  require(n >= 1, "graph needs at least one vertex");
  for (auto& e : raw) {
    if (e.first > e.second) std::swap(e.first, e.second);
    require(e.first != e.second, "self-loops are not allowed");
    require(e.first >= 1 && e.second <= n, "edge endpoint out of range");
  }
  std::sort(raw.begin(), raw.end());
  const auto last = std::unique(raw.begin(), raw.end());
  if (duplicates != nullptr) *duplicates = raw.end() - last;
  raw.erase(last, raw.end());
  return Graph{n, std::move(raw)};
}

// Text format: '#' or 'c' lines are comments; the first data line is
// "n m_edges"; each following data line is "i j" or "e i j", 1-indexed.
// Duplicate edges are dropped with a note on `warn`; malformed lines raise
// errors naming the offending line number. `name` labels the source in
// error messages.
inline Graph load_graph_stream(std::istream& in, const std::string& name,
                               std::ostream* warn = nullptr) {
  auto fail = [&name](long line_no, const std::string& msg) {
    throw std::runtime_error("parse error in " + name + " at line " +
                             std::to_string(line_no) + ": " + msg);
  };

  int n = 0;
  long declared = -1, seen = 0, line_no = 0;
  std::vector<std::pair<int, int>> raw;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;                    // blank line
    if (first[0] == '#' || first == "c") continue;   // comment
    if (declared < 0) {
      std::istringstream hs(line);
      if (!(hs >> n >> declared) || n < 1 || declared < 0)
        fail(line_no, "expected header \"n m_edges\"");
      std::string extra;
      if (hs >> extra) fail(line_no, "trailing tokens after header");
      continue;
    }
    int i = 0, j = 0;
    std::string extra;
    if (first == "e") {
      if (!(ls >> i >> j)) fail(line_no, "expected \"e i j\"");
      if (ls >> extra) fail(line_no, "trailing tokens after edge");
    } else {
      std::istringstream es(line);
      if (!(es >> i >> j)) fail(line_no, "expected \"i j\"");
      if (es >> extra) fail(line_no, "trailing tokens after edge");
    }
    if (i < 1 || j < 1 || i > n || j > n) fail(line_no, "edge endpoint out of range");
    if (i == j) fail(line_no, "self-loop");
    raw.emplace_back(i, j);
    ++seen;
  }
  if (declared < 0) throw std::runtime_error("parse error in " + name + ": no header line");
  if (seen != declared)
    throw std::runtime_error("edge count mismatch in " + name + ": header declares " +
                             std::to_string(declared) + ", file has " +
                             std::to_string(seen));
  long dups = 0;
  Graph g = make_graph(n, std::move(raw), &dups);
  if (dups > 0 && warn != nullptr)
    *warn << "warning: dropped " << dups << " duplicate edge(s) in " << name << "\n";
  return g;
}

inline Graph load_graph(const std::string& path, std::ostream* warn = nullptr) {
  std::ifstream in(path);
  require(in.good(), "cannot open graph file: " + path);
  return load_graph_stream(in, path, warn);
}

inline std::string graph_to_text(const Graph& g) {
  std::ostringstream out;
  out << g.n << " " << g.edges.size() << "\n";
  for (const auto& [i, j] : g.edges) out << i << " " << j << "\n";
  return out.str();
}

// ---- named families ----

inline Graph cycle_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) e.emplace_back(i, i + 1);
  if (n >= 3) e.emplace_back(1, n);
  return make_graph(n, std::move(e));
}

inline Graph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) e.emplace_back(i, j);
  return make_graph(n, std::move(e));
}

inline Graph empty_graph(int n) { return Graph{n, {}}; }

// d-dimensional hypercube: 2^d vertices, edges between binary labels at
// Hamming distance one.
inline Graph hypercube_graph(int d) {
  require(d >= 1 && d <= 20, "hypercube dimension out of range");
  const int n = 1 << d;
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v < n; ++v)
    for (int k = 0; k < d; ++k) {
      const int u = v ^ (1 << k);
      if (v < u) e.emplace_back(v + 1, u + 1);
    }
  return make_graph(n, std::move(e));
}

// Kneser graph K(5,2): vertices are the 2-subsets of {1..5}, edges between
// disjoint subsets.
inline Graph petersen_graph() {
  std::vector<std::pair<int, int>> subsets;
  for (int a = 1; a <= 5; ++a)
    for (int b = a + 1; b <= 5; ++b) subsets.emplace_back(a, b);
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < 10; ++u)
    for (int v = u + 1; v < 10; ++v) {
      const auto& [a, b] = subsets[u];
      const auto& [c, d] = subsets[v];
      if (a != c && a != d && b != c && b != d) e.emplace_back(u + 1, v + 1);
    }
  return make_graph(10, std::move(e));
}

}  // namespace lrsdp

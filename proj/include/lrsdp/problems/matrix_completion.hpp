#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lrsdp/core/rng.hpp"
#include "lrsdp/core/types.hpp"

namespace lrsdp {

struct Observation {
  int i = 0;  // row in 1..n1
  int j = 0;  // column in 1..n2
  double value = 0.0;
};

// Observed entries of an n1×n2 matrix, 1-indexed, with no duplicates.
struct ObservationSet {
  int n1 = 0, n2 = 0;
  std::vector<Observation> entries;
};

// Validate bounds and reject duplicate positions; entry order is preserved
// (it fixes the constraint ordering of the built problem).
inline ObservationSet make_observations(int n1, int n2,
                                        std::vector<Observation> entries) {
  require(n1 >= 1 && n2 >= 1, "observation grid must be at least 1×1");
  std::vector<std::pair<int, int>> pos;
  pos.reserve(entries.size());
  for (const auto& e : entries) {
    require(e.i >= 1 && e.i <= n1 && e.j >= 1 && e.j <= n2,
            "observation index out of range");
    pos.emplace_back(e.i, e.j);
  }
  std::sort(pos.begin(), pos.end());
  require(std::adjacent_find(pos.begin(), pos.end()) == pos.end(),
          "duplicate observation position");
  return ObservationSet{n1, n2, std::move(entries)};
}

// Matrix-completion SDP: minimize ½ tr X over PSD X = [[W₁, Y], [Yᵀ, W₂]]
// with the off-diagonal block pinned to the observations, Y_{ij} = M_{ij}.
// Constraint k reads the block entry once: A_k•X = X_{i, n1+j} (symmetrized
// internally), b_k = M_{ij}. Trace bound τ = 2√(n1)·‖Y₀‖_F with Y₀ the
// trivial completion holding the observed values and zeros elsewhere.
inline SdpProblem<Real> build_matrix_completion(const ObservationSet& obs) {
  require(obs.n1 >= 1 && obs.n2 >= 1, "observation grid must be at least 1×1");
  require(!obs.entries.empty(), "need at least one observation");
  double fro2 = 0.0;
  for (const auto& e : obs.entries) fro2 += e.value * e.value;
  require(fro2 > 0.0, "all observed values are zero; the instance is trivial");

  SdpProblem<Real> P;
  P.n = obs.n1 + obs.n2;
  P.m = static_cast<Eigen::Index>(obs.entries.size());
  P.tau = 2.0 * std::sqrt(static_cast<double>(obs.n1)) * std::sqrt(fro2);
  P.b = RealVec(P.m);
  for (Eigen::Index k = 0; k < P.m; ++k)
    P.b[k] = obs.entries[static_cast<std::size_t>(k)].value;
  P.objective_scale = 1.0;
  P.kind = "matcomp";

  const int n1 = obs.n1;
  auto ent = std::make_shared<const std::vector<Observation>>(obs.entries);

  P.c_apply = [](const Vec<Real>& v) { return Vec<Real>(0.5 * v); };
  P.q_A = [ent, n1](const Vec<Real>& y) {
    RealVec out(static_cast<Eigen::Index>(ent->size()));
    Eigen::Index k = 0;
    for (const auto& e : *ent) out[k++] = y[e.i - 1] * y[n1 + e.j - 1];
    return out;
  };
  P.adjoint_apply = [ent, n1](const RealVec& p, const Vec<Real>& v) {
    Vec<Real> out = Vec<Real>::Zero(v.size());
    Eigen::Index k = 0;
    for (const auto& e : *ent) {
      out[e.i - 1] += 0.5 * p[k] * v[n1 + e.j - 1];
      out[n1 + e.j - 1] += 0.5 * p[k] * v[e.i - 1];
      ++k;
    }
    return out;
  };
  return P;
}

struct MatrixCompletionInstance {
  ObservationSet obs;
  RealMat M;  // hidden ground-truth matrix, n1×n2
};

// Synthetic instance: M = UVᵀ with independent standard normal factors, and
// m = ⌈γ·r·(n1+n2−r)⌉ observations (γ = r·ln(n1+n2), natural log) drawn
// uniformly without replacement. Bit-reproducible for a fixed seed.
inline MatrixCompletionInstance generate_matrix_completion(int n1, int n2, int r,
                                                           std::uint64_t seed) {
  require(n1 >= 1 && n2 >= 1, "observation grid must be at least 1×1");
  require(r >= 1 && r <= std::min(n1, n2), "rank must lie in [1, min(n1, n2)]");

  const double gamma = r * std::log(static_cast<double>(n1 + n2));
  const long long total = static_cast<long long>(n1) * n2;
  const long long m =
      static_cast<long long>(std::ceil(gamma * r * (n1 + n2 - r)));
  require(m <= total, "oversampling exceeds the number of matrix entries");

  RealMat U(n1, r), V(n2, r);
  {
    Rng rng(mix_seed(seed, 0));
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < n1; ++i) U(i, j) = rng.normal();
  }
  {
    Rng rng(mix_seed(seed, 1));
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < n2; ++i) V(i, j) = rng.normal();
  }
  RealMat M = U * V.transpose();

  // Floyd's sampling: m distinct cells of the n1×n2 grid, O(m) memory.
  Rng rng(mix_seed(seed, 2));
  std::unordered_set<long long> chosen;
  chosen.reserve(static_cast<std::size_t>(m) * 2);
  for (long long t = total - m; t < total; ++t) {
    const long long x =
        static_cast<long long>(rng.uniform_below(static_cast<std::uint64_t>(t) + 1));
    if (!chosen.insert(x).second) chosen.insert(t);
  }
  std::vector<long long> cells(chosen.begin(), chosen.end());
  std::sort(cells.begin(), cells.end());

  std::vector<Observation> entries;
  entries.reserve(cells.size());
  for (long long c : cells) {
    const int i = static_cast<int>(c / n2) + 1;
    const int j = static_cast<int>(c % n2) + 1;
    entries.push_back({i, j, M(i - 1, j - 1)});
  }
  return {make_observations(n1, n2, std::move(entries)), std::move(M)};
}

// CSV format: first data line is the header "n1,n2"; each following line is
// "i,j,value". '#' lines are comments. Malformed lines raise errors naming
// the line number; duplicate positions are rejected. `name` labels the
// source in error messages.
inline ObservationSet load_observations_stream(std::istream& in,
                                               const std::string& name) {
  auto fail = [&name](long line_no, const std::string& msg) {
    throw std::runtime_error("parse error in " + name + " at line " +
                             std::to_string(line_no) + ": " + msg);
  };
  auto split3 = [](const std::string& line, std::string out[3]) {
    int field = 0;
    for (char c : line) {
      if (c == ',') {
        if (++field > 2) return false;
      } else {
        out[field].push_back(c);
      }
    }
    return true;
  };

  int n1 = -1, n2 = -1;
  std::vector<Observation> entries;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') stripped.push_back(c);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::string f[3];
    if (!split3(stripped, f)) fail(line_no, "too many fields");
    try {
      if (n1 < 0) {
        if (f[2].empty() && !f[1].empty()) {
          std::size_t used = 0;
          n1 = std::stoi(f[0], &used);
          if (used != f[0].size()) throw std::invalid_argument("");
          n2 = std::stoi(f[1], &used);
          if (used != f[1].size()) throw std::invalid_argument("");
          if (n1 < 1 || n2 < 1) fail(line_no, "grid dimensions must be positive");
          continue;
        }
        fail(line_no, "expected header \"n1,n2\"");
      }
      if (f[1].empty() || f[2].empty()) fail(line_no, "expected \"i,j,value\"");
      std::size_t used = 0;
      Observation e;
      e.i = std::stoi(f[0], &used);
      if (used != f[0].size()) throw std::invalid_argument("");
      e.j = std::stoi(f[1], &used);
      if (used != f[1].size()) throw std::invalid_argument("");
      e.value = std::stod(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("");
      if (e.i < 1 || e.i > n1 || e.j < 1 || e.j > n2)
        fail(line_no, "observation index out of range");
      entries.push_back(e);
    } catch (const std::invalid_argument&) {
      fail(line_no, "malformed field");
    } catch (const std::out_of_range&) {
      fail(line_no, "field out of numeric range");
    }
  }
  if (n1 < 0) throw std::runtime_error("parse error in " + name + ": no header line");
  return make_observations(n1, n2, std::move(entries));
}

inline ObservationSet load_observations(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open observation file: " + path);
  return load_observations_stream(in, path);
}

inline std::string observations_to_text(const ObservationSet& obs) {
  std::ostringstream out;
  out << obs.n1 << "," << obs.n2 << "\n";
  char buf[40];
  for (const auto& e : obs.entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << e.i << "," << e.j << "," << buf << "\n";
  }
  return out.str();
}

}  // namespace lrsdp

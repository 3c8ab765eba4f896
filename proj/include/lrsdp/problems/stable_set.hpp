#pragma once
#include <memory>
#include <utility>
#include <vector>

#include "lrsdp/core/types.hpp"
#include "lrsdp/problems/graph.hpp"

namespace lrsdp {

// Stable-set SDP over the unit-trace spectraplex: maximize (ee^T)•X subject
// to X_ij = 0 on every edge and tr X = 1. Stated internally as minimizing
// −(ee^T)•X, so objective_scale = −1 flips the reported value back to the
// maximization form. Constraints are the |E| edge equalities followed by the
// trace equality (b = (0,…,0,1)).
inline SdpProblem<Real> build_stable_set(const Graph& g) {
  require(g.n >= 1, "graph needs at least one vertex");
  SdpProblem<Real> P;
  P.n = g.n;
  P.m = static_cast<Eigen::Index>(g.edges.size()) + 1;
  P.tau = 1.0;
  P.b = RealVec::Zero(P.m);
  P.b[P.m - 1] = 1.0;
  P.objective_scale = -1.0;
  P.kind = "stableset";

  auto edges = std::make_shared<const std::vector<std::pair<int, int>>>(g.edges);

  P.c_apply = [](const Vec<Real>& v) {
    return Vec<Real>(Vec<Real>::Constant(v.size(), -v.sum()));
  };
  P.q_A = [edges](const Vec<Real>& y) {
    RealVec out(static_cast<Eigen::Index>(edges->size()) + 1);
    Eigen::Index k = 0;
    for (const auto& [i, j] : *edges) out[k++] = y[i - 1] * y[j - 1];
    out[k] = y.squaredNorm();
    return out;
  };
  P.adjoint_apply = [edges](const RealVec& p, const Vec<Real>& v) {
    Vec<Real> out = p[static_cast<Eigen::Index>(edges->size())] * v;
    Eigen::Index k = 0;
    for (const auto& [i, j] : *edges) {
      out[i - 1] += 0.5 * p[k] * v[j - 1];
      out[j - 1] += 0.5 * p[k] * v[i - 1];
      ++k;
    }
    return out;
  };
  return P;
}

}  // namespace lrsdp

#pragma once
#include <optional>

#include "lrsdp/core/lanczos.hpp"
#include "lrsdp/core/types.hpp"

namespace lrsdp {

// Frank-Wolfe vertex over {X ⪰ 0, tr X ≤ tau}: the linear form G•X is
// minimized at tau·y yᴴ for a minimum eigenvector y when λ_min(G) < 0, and at
// the zero matrix otherwise. theta = max{−λ_min(G), 0}; y is empty for the
// zero vertex so shrink steps need no allocation.
template <class S>
struct FwVertexResult {
  double theta = 0;
  std::optional<Vec<S>> y;  // unit vector; vertex is tau·y yᴴ when present
  EigResult<S> eig;
};

template <class S>
FwVertexResult<S> fw_vertex(const LinOp<S>& grad_op, double tau, const EigConfig& cfg) {
  require(tau > 0, "trace cap must be positive");
  EigResult<S> e = min_eigenpair_checked<S>(grad_op.apply, grad_op.n, cfg);
  FwVertexResult<S> r;
  r.theta = std::max(-e.lambda, 0.0);
  if (r.theta > 0) r.y = e.v;
  r.eig = std::move(e);
  return r;
}

// Optimality gap ε = (G Y)•Y + tau·theta at Z = Y Yᴴ: the smallest ε with
// 0 ∈ G + ∂_ε δ(Z) over the trace-tau spectraplex. Nonnegative up to
// round-off; values within −1e−12 of zero are clamped to zero.
template <class S>
double optimality_gap(const LinOp<S>& grad_op, const Mat<S>& Y, double theta, double tau) {
  double val = 0;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    val += rdot(Y.col(j), grad_op.apply(Y.col(j)));
  }
  val += tau * theta;
  if (val < 0 && val >= -1e-12) val = 0;
  return val;
}

}  // namespace lrsdp

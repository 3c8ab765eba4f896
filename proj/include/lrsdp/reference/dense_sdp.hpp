#pragma once
#include <cmath>
#include <vector>

#include <lrsdp/core/types.hpp>

// Dense mirror of the matrix-free problem interface, recovered entirely
// through the public callbacks so it can cross-check them. Desk-scale only.

namespace lrsdp::reference {

template <class S>
struct DenseSdp {
  Eigen::Index n = 0;
  Mat<S> C;
  std::vector<Mat<S>> A;  // one Hermitian matrix per constraint
  RealVec b;
  double tau = 0;

  RealVec apply_A(const Mat<S>& X) const {
    RealVec out(static_cast<Eigen::Index>(A.size()));
    for (std::size_t k = 0; k < A.size(); ++k)
      out[static_cast<Eigen::Index>(k)] = rdot(A[k], X);
    return out;
  }
  Mat<S> adjoint(const RealVec& p) const {
    Mat<S> out = Mat<S>::Zero(n, n);
    for (std::size_t k = 0; k < A.size(); ++k)
      out += S(p[static_cast<Eigen::Index>(k)]) * A[k];
    return out;
  }
  double objective(const Mat<S>& X) const { return rdot(C, X); }
};

// Rebuilds C column-by-column from c_apply and each A_k entrywise from q_A:
// the quadratic map determines the Hermitian matrix through
//   A_k • (uvᴴ + vuᴴ) = q_A(u + v) − q_A(u) − q_A(v),
// evaluated at unit-vector pairs (and at v ↦ iv for the imaginary parts).
template <class S>
DenseSdp<S> densify(const SdpProblem<S>& P) {
  require(P.n >= 1 && P.n <= 200, "dense reference guardrail exceeded");
  const Eigen::Index n = P.n;
  const Eigen::Index m = P.m;
  DenseSdp<S> D;
  D.n = n;
  D.b = P.b;
  D.tau = P.tau;

  D.C = Mat<S>(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vec<S> e = Vec<S>::Zero(n);
    e[j] = S(1);
    D.C.col(j) = P.c_apply(e);
  }
  const double cscale = 1.0 + D.C.cwiseAbs().maxCoeff();
  require((D.C - D.C.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * cscale,
          "objective operator is not Hermitian");
  D.C = ((D.C + D.C.adjoint()) / S(2)).eval();

  D.A.assign(static_cast<std::size_t>(m), Mat<S>::Zero(n, n));
  std::vector<RealVec> diag(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec<S> e = Vec<S>::Zero(n);
    e[i] = S(1);
    diag[static_cast<std::size_t>(i)] = P.q_A(e);
    for (Eigen::Index k = 0; k < m; ++k)
      D.A[static_cast<std::size_t>(k)](i, i) = S(diag[static_cast<std::size_t>(i)][k]);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      Vec<S> u = Vec<S>::Zero(n);
      u[i] = S(1);
      u[j] = S(1);
      RealVec cross = P.q_A(u) - diag[static_cast<std::size_t>(i)] - diag[static_cast<std::size_t>(j)];
      RealVec cross_im = RealVec::Zero(m);
      if constexpr (is_complex_v<S>) {
        Vec<S> w = Vec<S>::Zero(n);
        w[i] = S(1);
        w[j] = S(0, 1);
        // 2Re(ūᴴA v̄) with v̄ = i e_j equals −2 Im(A_ij)
        cross_im = P.q_A(w) - diag[static_cast<std::size_t>(i)] - diag[static_cast<std::size_t>(j)];
      }
      for (Eigen::Index k = 0; k < m; ++k) {
        if constexpr (is_complex_v<S>) {
          const S entry(0.5 * cross[k], -0.5 * cross_im[k]);
          D.A[static_cast<std::size_t>(k)](i, j) = entry;
          D.A[static_cast<std::size_t>(k)](j, i) = std::conj(entry);
        } else {
          D.A[static_cast<std::size_t>(k)](i, j) = 0.5 * cross[k];
          D.A[static_cast<std::size_t>(k)](j, i) = 0.5 * cross[k];
        }
      }
    }
  }
  return D;
}

}  // namespace lrsdp::reference

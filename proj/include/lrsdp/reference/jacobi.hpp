#pragma once
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <lrsdp/core/types.hpp>

// Dense Hermitian eigendecomposition by cyclic Jacobi sweeps. Deliberately
// self-contained so the desk-scale reference solvers do not share numerical
// machinery with the production Krylov path they are meant to check.

namespace lrsdp::reference {

template <class S>
struct JacobiEig {
  RealVec values;  // ascending
  Mat<S> vectors;  // column j pairs with values[j]
  int sweeps = 0;
};

namespace detail {

inline double lrsdp_conj(double x) { return x; }
inline Complex lrsdp_conj(const Complex& x) { return std::conj(x); }

template <class S>
double off_diagonal_norm(const Mat<S>& H) {
  double acc = 0;
  for (Eigen::Index q = 0; q < H.cols(); ++q)
    for (Eigen::Index p = 0; p < q; ++p) acc += std::norm(H(p, q));
  return std::sqrt(2.0 * acc);
}

// One two-sided rotation J(p,q) chosen to zero H(p,q); H ← JᴴHJ and V ← VJ.
// J differs from the identity only in J(p,p)=J(q,q)=c, J(p,q)=s·u,
// J(q,p)=−s·conj(u) with u = H(p,q)/|H(p,q)| and (c,s) the classic inner
// rotation for the 2×2 block [[H_pp, |H_pq|], [|H_pq|, H_qq]].
template <class S>
void rotate(Mat<S>& H, Mat<S>* V, Eigen::Index p, Eigen::Index q) {
  const double r = std::abs(H(p, q));
  if (r == 0) return;
  const S u = H(p, q) / r;
  const double app = std::real(H(p, p));
  const double aqq = std::real(H(q, q));
  const double zeta = (aqq - app) / (2.0 * r);
  const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
  const double c = 1.0 / std::hypot(1.0, t);
  const double s = t * c;

  const Eigen::Index n = H.rows();
  for (Eigen::Index k = 0; k < n; ++k) {  // H ← HJ
    const S hp = H(k, p), hq = H(k, q);
    H(k, p) = c * hp - s * lrsdp_conj(u) * hq;
    H(k, q) = s * u * hp + c * hq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {  // H ← JᴴH
    const S hp = H(p, k), hq = H(q, k);
    H(p, k) = c * hp - s * u * hq;
    H(q, k) = s * lrsdp_conj(u) * hp + c * hq;
  }
  H(p, q) = S(0);  // exact by construction; clears rounding residue
  H(q, p) = S(0);
  H(p, p) = S(std::real(H(p, p)));
  H(q, q) = S(std::real(H(q, q)));
  if (V) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const S vp = (*V)(k, p), vq = (*V)(k, q);
      (*V)(k, p) = c * vp - s * lrsdp_conj(u) * vq;
      (*V)(k, q) = s * u * vp + c * vq;
    }
  }
}

}  // namespace detail

// Full decomposition; H is Hermitian within roundoff (it is symmetrized on
// entry). Stops when the off-diagonal Frobenius mass falls below tol·‖H‖_F.
template <class S>
JacobiEig<S> jacobi_eig(Mat<S> H, double tol = 1e-12, int max_sweeps = 100,
                        bool with_vectors = true) {
  require(H.rows() == H.cols(), "matrix must be square");
  require(H.allFinite(), "matrix entries must be finite");
  const Eigen::Index n = H.rows();
  JacobiEig<S> out;
  if (n == 0) {
    out.values = RealVec(0);
    out.vectors = Mat<S>(0, 0);
    return out;
  }
  H = ((H + H.adjoint()) / S(2)).eval();
  Mat<S> V;
  if (with_vectors) V = Mat<S>::Identity(n, n);
  const double scale = std::max(H.norm(), 1e-300);
  int sweeps = 0;
  while (detail::off_diagonal_norm(H) > tol * scale) {
    require(sweeps < max_sweeps, "dense eigensolver failed to converge");
    for (Eigen::Index q = 1; q < n; ++q)
      for (Eigen::Index p = 0; p < q; ++p)
        detail::rotate(H, with_vectors ? &V : nullptr, p, q);
    ++sweeps;
  }
  out.sweeps = sweeps;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::sort(order.begin(), order.end(), [&H](Eigen::Index a, Eigen::Index b) {
    return std::real(H(a, a)) < std::real(H(b, b));
  });
  out.values = RealVec(n);
  if (with_vectors) out.vectors = Mat<S>(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values[j] = std::real(H(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]));
    if (with_vectors) out.vectors.col(j) = V.col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

// Minimum eigenpair only: Jacobi sweeps without accumulating the basis (the
// dominant cost at larger n), then inverse iteration on a shifted factorization
// recovers the eigenvector to machine precision.
template <class S>
std::pair<double, Vec<S>> jacobi_min_eigpair(const Mat<S>& H, double tol = 1e-12) {
  const Eigen::Index n = H.rows();
  require(n >= 1, "matrix must be nonempty");
  JacobiEig<S> vals = jacobi_eig<S>(H, tol, 100, /*with_vectors=*/false);
  const double lambda = vals.values[0];
  const double scale = std::max(H.norm(), 1e-300);
  const Mat<S> Hs = ((H + H.adjoint()) / S(2)).eval();
  Mat<S> M = Hs;
  const double shift = lambda - 1e-12 * scale;
  M.diagonal().array() -= S(shift);
  Eigen::PartialPivLU<Mat<S>> lu(M);
  Vec<S> v = Vec<S>::Constant(n, S(1) / S(std::sqrt(double(n))));
  for (int it = 0; it < 3; ++it) {
    Vec<S> w = lu.solve(v);
    const double nrm = w.norm();
    if (!(nrm > 0) || !w.allFinite()) break;  // singular solve: v is already converged
    v = w / nrm;
    const double res = (Hs * v - lambda * v).norm();
    if (res <= 1e-10 * scale) return {lambda, v};
  }
  if ((Hs * v - lambda * v).norm() <= 1e-8 * scale) return {lambda, v};
  // Shifted solves failed to settle (clustered spectrum); fall back to the
  // full decomposition.
  JacobiEig<S> full = jacobi_eig<S>(Hs, tol);
  return {full.values[0], full.vectors.col(0)};
}

}  // namespace lrsdp::reference

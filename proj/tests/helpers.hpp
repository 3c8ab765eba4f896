#pragma once
// Dense brute-force oracles for tests. Everything here owns an explicit dense
// ground truth and is independent of the library's iterative paths.
#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "lrsdp/core/rng.hpp"
#include "lrsdp/core/types.hpp"

namespace testutil {

using lrsdp::Complex;
using lrsdp::Mat;
using lrsdp::Real;
using lrsdp::RealVec;
using lrsdp::Rng;
using lrsdp::Vec;

template <class S>
Mat<S> random_hermitian(Eigen::Index n, Rng& rng) {
  Mat<S> A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if constexpr (lrsdp::is_complex_v<S>) {
        A(i, j) = rng.cnormal();
      } else {
        A(i, j) = rng.normal();
      }
    }
  }
  Mat<S> H = (A + A.adjoint()) / 2;
  return H;
}

template <class S>
Mat<S> random_factor(Eigen::Index n, Eigen::Index s, Rng& rng) {
  Mat<S> Y(n, s);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) {
      if constexpr (lrsdp::is_complex_v<S>) {
        Y(i, j) = rng.cnormal();
      } else {
        Y(i, j) = rng.normal();
      }
    }
  }
  return Y;
}

// Dense SDP data with explicitly stored matrices; the matrix-free callbacks
// are built from the dense data, so dense evaluations are the ground truth.
template <class S>
struct DenseToy {
  Mat<S> C;
  std::vector<Mat<S>> A;
  RealVec b;
  double tau = 1.0;

  Eigen::Index n() const { return C.rows(); }
  Eigen::Index m() const { return static_cast<Eigen::Index>(A.size()); }

  RealVec eval_constraints(const Mat<S>& X) const {
    RealVec out(m());
    for (Eigen::Index k = 0; k < m(); ++k) out[k] = lrsdp::rdot(A[k], X);
    return out;
  }

  Mat<S> adjoint(const RealVec& p) const {
    Mat<S> M = Mat<S>::Zero(n(), n());
    for (Eigen::Index k = 0; k < m(); ++k) M += p[k] * A[k];
    return M;
  }

  // dense AL gradient C + A*(p + beta(A(X) − b)) at X
  Mat<S> al_gradient(const Mat<S>& X, const RealVec& p, double beta) const {
    RealVec q = p + beta * (eval_constraints(X) - b);
    return C + adjoint(q);
  }

  Real al_value(const Mat<S>& X, const RealVec& p, double beta) const {
    RealVec r = eval_constraints(X) - b;
    return lrsdp::rdot(C, X) + p.dot(r) + 0.5 * beta * r.squaredNorm();
  }

  lrsdp::SdpProblem<S> to_problem() const {
    auto self = std::make_shared<DenseToy<S>>(*this);
    lrsdp::SdpProblem<S> P;
    P.n = n();
    P.m = m();
    P.tau = tau;
    P.b = b;
    P.c_apply = [self](const Vec<S>& v) { return (self->C * v).eval(); };
    P.adjoint_apply = [self](const RealVec& p, const Vec<S>& v) {
      Vec<S> out = Vec<S>::Zero(self->n());
      for (Eigen::Index k = 0; k < self->m(); ++k) out += p[k] * (self->A[k] * v);
      return out;
    };
    P.q_A = [self](const Vec<S>& y) {
      RealVec out(self->m());
      for (Eigen::Index k = 0; k < self->m(); ++k)
        out[k] = std::real(y.dot(self->A[k] * y));
      return out;
    };
    return P;
  }
};

template <class S>
DenseToy<S> random_toy(Eigen::Index n, Eigen::Index m, double tau, Rng& rng) {
  DenseToy<S> T;
  T.C = random_hermitian<S>(n, rng);
  T.A.reserve(m);
  for (Eigen::Index k = 0; k < m; ++k) T.A.push_back(random_hermitian<S>(n, rng));
  T.b = RealVec::NullaryExpr(m, [&](Eigen::Index) { return rng.normal(); });
  T.tau = tau;
  return T;
}

// The n = 2 toy with constraints (X_12, tr X): the hand-checkable instance.
inline DenseToy<Real> two_by_two_toy() {
  DenseToy<Real> T;
  T.C = Mat<Real>::Zero(2, 2);
  T.C(0, 0) = -1;
  T.C(1, 1) = 2;
  Mat<Real> A1 = Mat<Real>::Zero(2, 2);
  A1(0, 1) = 0.5;
  A1(1, 0) = 0.5;
  T.A = {A1, Mat<Real>::Identity(2, 2)};
  T.b = RealVec::Zero(2);
  T.b[1] = 1;
  T.tau = 1.0;
  return T;
}

// Adjoint-identity suite: for random u, v, p verifies
//   ⟨p, q_A(u)⟩ = Re uᴴ(A*p)u                    (quadratic form),
//   ⟨p, q_A(u+v) − q_A(u) − q_A(v)⟩ = 2·Re uᴴ(A*p)v  (polarization),
//   Re uᴴ C v = Re vᴴ C u                         (C self-adjoint),
// each within tol relative to the magnitudes involved.
template <class S>
void check_problem_adjoints(const lrsdp::SdpProblem<S>& P, std::uint64_t seed,
                            int draws, double tol) {
  Rng rng(seed);
  for (int d = 0; d < draws; ++d) {
    Vec<S> u = random_factor<S>(P.n, 1, rng).col(0);
    Vec<S> v = random_factor<S>(P.n, 1, rng).col(0);
    RealVec p = RealVec::NullaryExpr(P.m, [&](Eigen::Index) { return rng.normal(); });

    const double quad_lhs = p.dot(P.q_A(u));
    const double quad_rhs = lrsdp::rdot(u, P.adjoint_apply(p, u));
    REQUIRE(std::abs(quad_lhs - quad_rhs) <=
            tol * (1.0 + std::abs(quad_lhs) + std::abs(quad_rhs)));

    const double pol_lhs =
        p.dot((P.q_A(u + v) - P.q_A(u) - P.q_A(v)).eval());
    const double pol_rhs = 2.0 * lrsdp::rdot(u, P.adjoint_apply(p, v));
    REQUIRE(std::abs(pol_lhs - pol_rhs) <=
            tol * (1.0 + std::abs(pol_lhs) + std::abs(pol_rhs)));

    const double c_uv = lrsdp::rdot(u, P.c_apply(v));
    const double c_vu = lrsdp::rdot(v, P.c_apply(u));
    REQUIRE(std::abs(c_uv - c_vu) <= tol * (1.0 + std::abs(c_uv)));
  }
}

// Dense minimum eigenpair oracle (Eigen's direct solver).
template <class S>
std::pair<double, Vec<S>> dense_min_eig(const Mat<S>& G) {
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(G);
  return {es.eigenvalues()[0], es.eigenvectors().col(0)};
}

// Exact minimum of the linear form G•V over the trace-tau spectraplex by
// enumerating the candidate vertices {0} ∪ {tau·v_i v_iᴴ}.
template <class S>
double dense_min_linear_form(const Mat<S>& G, double tau) {
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(G);
  double best = 0.0;  // the zero matrix vertex
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    Vec<S> v = es.eigenvectors().col(i);
    double val = tau * std::real(v.dot(G * v));
    best = std::min(best, val);
  }
  return best;
}

}  // namespace testutil

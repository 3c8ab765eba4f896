#pragma once
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "lrsdp/core/rng.hpp"
#include "lrsdp/core/types.hpp"

namespace lrsdp {

struct EigConfig {
  int basis = 48;        // Krylov basis bound per restart cycle
  int thick = 6;         // Ritz pairs retained at a thick restart
  int max_matvecs = 8000;
  double tol = 1e-10;    // success: ‖op(v) − λv‖ ≤ tol·max(1, |λ|)
  std::uint64_t seed = 0;
};

namespace detail {

template <class S>
Vec<S> random_unit(Eigen::Index n, Rng& rng) {
  Vec<S> v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (is_complex_v<S>) {
      v[i] = rng.cnormal();
    } else {
      v[i] = rng.normal();
    }
  }
  double nrm = v.norm();
  if (nrm == 0) {
    v.setZero();
    v[0] = S(1);
    return v;
  }
  return v / nrm;
}

}  // namespace detail

// Rough operator norm estimate: a fixed number of power iterations on op.
template <class S>
double estimate_op_norm(const std::function<Vec<S>(const Vec<S>&)>& op, Eigen::Index n,
                        int steps = 20, std::uint64_t seed = 0x9e3779b9ULL) {
  Rng rng(seed);
  Vec<S> v = detail::random_unit<S>(n, rng);
  double est = 0;
  for (int i = 0; i < steps; ++i) {
    Vec<S> w = op(v);
    double nrm = w.norm();
    if (nrm == 0) return est;
    est = std::max(est, nrm);
    v = w / nrm;
  }
  return est;
}

// Minimum eigenpair of a self-adjoint operator by Lanczos with full
// (two-pass) reorthogonalization and thick restarts. The projected matrix H =
// Vᴴ op V is maintained explicitly column-by-column, which keeps the restart
// bookkeeping exact: after each column is processed, op applied to the span of
// processed columns leaves the basis only through the single newest residual
// direction, so the Ritz residual estimate is β·|last component|.
template <class S>
EigResult<S> min_eigenpair(const std::function<Vec<S>(const Vec<S>&)>& op, Eigen::Index n,
                           const EigConfig& cfg) {
  require(n >= 1, "operator dimension must be positive");
  require(cfg.tol > 0, "eigensolver tolerance must be positive");
  const int basis = static_cast<int>(std::min<Eigen::Index>(std::max(cfg.basis, 2), n));
  const int thick = std::max(1, std::min(cfg.thick, basis - 1));

  Rng rng(cfg.seed);
  Mat<S> V(n, basis + 1);
  Mat<S> H = Mat<S>::Zero(basis + 1, basis + 1);
  V.col(0) = detail::random_unit<S>(n, rng);

  int k = 1;          // columns in V; column k−1 is the one not yet processed
  int matvecs = 0;
  EigResult<S> best;
  best.residual = std::numeric_limits<double>::infinity();

  auto explicit_check = [&](double lam_guess, const Vec<S>& x) -> EigResult<S> {
    Vec<S> w = op(x);
    ++matvecs;
    double lam = rdot(x, w);  // Rayleigh quotient, real for self-adjoint op
    double res = (w - lam * x).norm();
    EigResult<S> r;
    r.lambda = lam;
    r.v = x;
    r.residual = res;
    r.matvecs = matvecs;
    double thresh = std::max(cfg.tol, 8e-15 * std::sqrt(static_cast<double>(n))) *
                    std::max(1.0, std::abs(lam));
    r.converged = res <= thresh;
    (void)lam_guess;
    return r;
  };

  while (true) {
    // ---- process column k−1 ----
    Vec<S> w = op(V.col(k - 1));
    ++matvecs;
    Vec<S> h = V.leftCols(k).adjoint() * w;
    w.noalias() -= V.leftCols(k) * h;
    Vec<S> h2 = V.leftCols(k).adjoint() * w;  // second reorthogonalization pass
    w.noalias() -= V.leftCols(k) * h2;
    h += h2;
    for (int i = 0; i < k; ++i) {
      H(i, k - 1) = h[i];
      if constexpr (is_complex_v<S>) {
        H(k - 1, i) = std::conj(h[i]);
      } else {
        H(k - 1, i) = h[i];
      }
    }
    H(k - 1, k - 1) = S(std::real(h[k - 1]));
    double beta = w.norm();

    // ---- Ritz analysis of the k×k projection ----
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(H.topLeftCorner(k, k));
    const auto& theta = es.eigenvalues();  // ascending
    const Mat<S>& Q = es.eigenvectors();
    double lam0 = theta[0];
    double est = beta * std::abs(Q(k - 1, 0));
    double thresh = std::max(cfg.tol, 8e-15 * std::sqrt(static_cast<double>(n))) *
                    std::max(1.0, std::abs(lam0));

    if (est <= thresh || k == n || matvecs >= cfg.max_matvecs) {
      Vec<S> x = V.leftCols(k) * Q.col(0);
      x /= x.norm();
      EigResult<S> r = explicit_check(lam0, x);
      if (r.residual < best.residual) best = r;
      if (r.converged) return r;
      if (k == n && est <= thresh) {
        // full space spanned and the projection agrees: nothing better exists
        best.converged = best.residual <= thresh;
        return best;
      }
      if (matvecs >= cfg.max_matvecs) {
        best.matvecs = matvecs;
        return best;  // converged == false; caller decides how to react
      }
    }

    const double btol =
        1e-13 * std::max({1.0, std::abs(lam0), std::abs(theta[k - 1])});
    Vec<S> next;
    bool have_next = false;
    if (beta > btol) {
      next = w / beta;
      have_next = true;
    } else {
      // (near-)invariant subspace: inject a fresh random direction to keep
      // exploring; acceptance only ever happens through the residual test.
      for (int attempt = 0; attempt < 4 && !have_next; ++attempt) {
        Vec<S> r = detail::random_unit<S>(n, rng);
        r -= V.leftCols(k) * (V.leftCols(k).adjoint() * r).eval();
        r -= V.leftCols(k) * (V.leftCols(k).adjoint() * r).eval();
        double nrm = r.norm();
        if (nrm > 1e-8) {
          next = r / nrm;
          have_next = true;
        }
      }
      if (!have_next) {
        // no orthogonal direction left (k == n numerically): accept best so far
        Vec<S> x = V.leftCols(k) * Q.col(0);
        x /= x.norm();
        EigResult<S> r = explicit_check(lam0, x);
        if (r.residual < best.residual) best = r;
        return best.converged ? best : r;
      }
      beta = 0;  // the injected direction carries no Krylov coupling
    }

    if (k == basis) {
      // ---- thick restart: retain the lowest Ritz vectors ----
      int l = thick;
      Mat<S> Y = V.leftCols(k) * Q.leftCols(l);
      V.leftCols(l) = Y;
      H.setZero();
      for (int i = 0; i < l; ++i) H(i, i) = S(theta[i]);
      V.col(l) = next;
      k = l + 1;
    } else {
      V.col(k) = next;
      k += 1;
    }
  }
}

// Minimum eigenpair that throws on failure instead of returning a flag.
template <class S>
EigResult<S> min_eigenpair_checked(const std::function<Vec<S>(const Vec<S>&)>& op,
                                   Eigen::Index n, const EigConfig& cfg) {
  EigResult<S> r = min_eigenpair<S>(op, n, cfg);
  if (!r.converged) throw EigNonConverged(r.residual);
  return r;
}

}  // namespace lrsdp

#pragma once
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <lrsdp/core/types.hpp>
#include <lrsdp/reference/dense_sdp.hpp>
#include <lrsdp/reference/jacobi.hpp>
#include <lrsdp/reference/rfw.hpp>

// Dense augmented-Lagrangian reference solver: penalized subproblems go to the
// dense Frank–Wolfe method, multipliers follow the classic update, and
// termination is certified a posteriori from explicit residuals — the dual
// value −⟨b,p⟩ − τθ is a valid bound for any multiplier, so the reported
// optimality never relies on inner-solve tolerances.

namespace lrsdp::reference {

struct DenseAlConfig {
  double beta0 = 0;           // ≤ 0 selects 1 / max(1, ‖b‖)
  double beta_growth = 2.0;   // applied when feasibility stalls
  double beta_cap_scale = 1e8;
  double omega_shrink = 0.3;  // inner gap target decay per outer iteration
  long max_outer = 600;
  long rfw_cap_per_call = 20000000;
  double time_cap_s = std::numeric_limits<double>::infinity();
};

template <class S>
struct DenseAlResult {
  Mat<S> X;
  RealVec p;
  double theta = 0;  // dual eigenvalue shift: max{−λ_min(C + A*p), 0}
  double pval = 0;   // C•X, internal minimization form
  double dval = 0;   // −⟨b,p⟩ − τθ
  double primal_rel = 0;
  double gap_rel = 0;
  long outer = 0;
  long rfw_iterations = 0;
  double beta_final = 0;
};

template <class S>
DenseAlResult<S> dense_al_solve(const DenseSdp<S>& D, double eps, DenseAlConfig cfg = {}) {
  require(eps > 0, "tolerance must be positive");
  require(D.n >= 1 && D.C.rows() == D.n && D.b.size() == static_cast<Eigen::Index>(D.A.size()),
          "dense problem is inconsistent");
  const Eigen::Index n = D.n;
  const double bnorm = D.b.norm();
  const double eps_p = eps * (1.0 + bnorm);
  const double beta_floor = cfg.beta0 > 0 ? cfg.beta0 : 1.0 / std::max(1.0, bnorm);
  const auto started = std::chrono::steady_clock::now();

  DenseAlResult<S> res;
  res.p = RealVec::Zero(D.b.size());
  Mat<S> Z = Mat<S>::Zero(n, n);
  double beta = beta_floor;
  double eps_c = eps;  // refreshed once values are known
  double omega = 0.1 * (1.0 + std::abs(D.objective(Z)) + 0.5 * beta * bnorm * bnorm);
  double prev_feas = std::numeric_limits<double>::infinity();

  for (long t = 1; t <= cfg.max_outer; ++t) {
    res.outer = t;
    // Inner target: tight enough that the inner gap cannot dominate the
    // optimality-gap budget, loosened early by the decaying schedule.
    const double ebar = std::max(0.2 * eps_c, std::min(omega, 1e6));
    omega *= cfg.omega_shrink;

    const RealVec p_snapshot = res.p;
    const double beta_snapshot = beta;
    auto g = [&D, &p_snapshot, beta_snapshot](const Mat<S>& W) {
      const RealVec r = D.apply_A(W) - D.b;
      return D.objective(W) + p_snapshot.dot(r) + 0.5 * beta_snapshot * r.squaredNorm();
    };
    auto grad = [&D, &p_snapshot, beta_snapshot](const Mat<S>& W) {
      const RealVec q = p_snapshot + beta_snapshot * (D.apply_A(W) - D.b);
      return (D.C + D.adjoint(q)).eval();
    };
    RfwConfig rcfg;
    rcfg.eps_bar = ebar;
    rcfg.max_iters = cfg.rfw_cap_per_call;
    RfwResult<S> inner = rfw_solve<S>(g, grad, D.tau, Z, rcfg);
    Z = std::move(inner.Z);
    res.rfw_iterations += inner.iterations;

    const RealVec feas_vec = D.apply_A(Z) - D.b;
    const double feas = feas_vec.norm();
    res.p += beta * feas_vec;

    JacobiEig<S> slack = jacobi_eig<S>((D.C + D.adjoint(res.p)).eval());
    res.theta = std::max(-slack.values[0], 0.0);
    res.pval = D.objective(Z);
    res.dval = -D.b.dot(res.p) - D.tau * res.theta;
    res.primal_rel = feas / (1.0 + bnorm);
    res.gap_rel = std::abs(res.pval - res.dval) / (1.0 + std::abs(res.pval) + std::abs(res.dval));
    res.X = Z;
    res.beta_final = beta;
    if (res.primal_rel <= eps && res.gap_rel <= eps) return res;

    eps_c = eps * (1.0 + std::abs(res.pval) + std::abs(res.dval));
    if (feas > eps_p && feas > 0.5 * prev_feas) {
      beta = std::min(beta * cfg.beta_growth, cfg.beta_cap_scale * beta_floor);
    }
    prev_feas = feas;
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (elapsed > cfg.time_cap_s)
      throw std::runtime_error("dense reference solver exceeded its time budget");
  }
  throw std::runtime_error("dense reference solver hit its outer iteration cap");
}

}  // namespace lrsdp::reference

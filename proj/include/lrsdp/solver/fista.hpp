#pragma once
#include <cmath>
#include <functional>
#include <limits>

#include "lrsdp/core/types.hpp"

namespace lrsdp {

// Composite objective ψ_s + ψ_n over matrices with the Frobenius inner
// product. ψ_n enters only through its prox map; the gradient of ψ_s at the
// prox center is passed in so it can be reused for the stationarity residual.
template <class S>
struct CompositeObjective {
  std::function<double(const Mat<S>&)> smooth_value;
  std::function<Mat<S>(const Mat<S>&)> smooth_grad;
  // (z, ∇ψ_s(z), L) ↦ argmin_u { ⟨∇ψ_s(z), u−z⟩ + ψ_n(u) + (L/2)‖u−z‖² }
  std::function<Mat<S>(const Mat<S>&, const Mat<S>&, double)> prox;
};

struct FistaConfig {
  double mu = 0.5;      // strong-convexity modulus the recursion is run with
  double L0 = 1.0;      // initial curvature estimate, must exceed mu
  double sigma = 0.3;   // relative stationarity tolerance, in (0, 1/2) for use
                        // by the proximal-point layer
  double chi = 0.01;    // acceleration-failure test parameter, in (0, 1)
  long max_iter = 1000000;
};

template <class S>
struct FistaResult {
  bool success = false;
  bool failed_accel_test = false;  // stopped by the divergence test
  bool hit_iter_cap = false;
  Mat<S> y;                        // candidate solution
  Mat<S> v;                        // residual: v ∈ ∇ψ_s(y) + ∂ψ_n(y)
  double L = 0;                    // final curvature estimate
  long iters = 0;
  double A_final = 0, tau_final = 1;
};

// Adaptive accelerated composite gradient method with curvature doubling.
// Succeeds with (y, v, L) such that ‖v‖ ≤ sigma·‖y − x0‖ and v lies in the
// subdifferential of the composite model at y, or stops with a failure flag
// when the acceleration test detects that the assumed strong convexity does
// not hold along the trajectory.
template <class S>
FistaResult<S> fista_solve(const CompositeObjective<S>& obj, const Mat<S>& x0,
                           const FistaConfig& cfg) {
  require(cfg.mu > 0, "mu must be positive");
  require(cfg.L0 > cfg.mu, "L0 must exceed mu");
  require(cfg.sigma > 0, "sigma must be positive");
  require(cfg.chi > 0 && cfg.chi < 1, "chi must lie in (0,1)");

  const double mu = cfg.mu;
  const double sigma = cfg.sigma;
  const double chi = cfg.chi;

  Mat<S> y = x0;
  Mat<S> x = x0;
  double A = 0.0;
  double tau = 1.0;
  double L = cfg.L0;

  FistaResult<S> res;

  for (long i = 0; i < cfg.max_iter; ++i) {
    double Lnext = L;
    double a = 0;
    Mat<S> xt, grad_xt, ynext;
    while (true) {
      const double gap = Lnext - mu;
      if (gap < 1e-14 * mu) {
        a = A * 1e8 + 1.0;  // continuous limit of the stepsize root as L → mu
      } else {
        a = (tau + std::sqrt(tau * tau + 4.0 * tau * A * gap)) / (2.0 * gap);
      }
      xt = (A * y + a * x) / (A + a);
      grad_xt = obj.smooth_grad(xt);
      ynext = obj.prox(xt, grad_xt, Lnext);
      const double v_xt = obj.smooth_value(xt);
      const double lin = rdot(grad_xt, ynext - xt);
      const double dist2 = (ynext - xt).squaredNorm();
      const double v_y = obj.smooth_value(ynext);
      // Near a stationary point every term cancels to round-off; without a
      // noise floor the comparison is a coin flip that inflates L without
      // bound, and the inflated estimate then throttles later calls.
      const double fp_noise = 64.0 * std::numeric_limits<double>::epsilon() *
                              (std::abs(v_xt) + std::abs(lin) + std::abs(v_y) +
                               Lnext * dist2);
      if (v_xt + lin + (1.0 - chi) * Lnext / 4.0 * dist2 >= v_y - fp_noise) break;
      Lnext *= 2.0;
      if (Lnext > 1e300) throw std::runtime_error("curvature estimate diverged");
    }

    const double Anext = A + a;
    const double taunext = tau + a * mu;
    Mat<S> s = (Lnext - mu) * (xt - ynext);
    Mat<S> xnext = (mu * a * ynext + tau * x - a * s) / taunext;

    const double d0 = (ynext - x0).squaredNorm();
    const double dxt = (ynext - xt).squaredNorm();
    if (!(d0 >= chi * Anext * Lnext * dxt)) {
      res.failed_accel_test = true;
      res.y = ynext;
      res.L = Lnext;
      res.iters = i + 1;
      res.A_final = Anext;
      res.tau_final = taunext;
      return res;
    }

    Mat<S> v = obj.smooth_grad(ynext) - grad_xt + Lnext * (xt - ynext);
    if (v.norm() <= sigma * std::sqrt(d0)) {
      res.success = true;
      res.y = std::move(ynext);
      res.v = std::move(v);
      res.L = Lnext;
      res.iters = i + 1;
      res.A_final = Anext;
      res.tau_final = taunext;
      return res;
    }

    y = std::move(ynext);
    x = std::move(xnext);
    A = Anext;
    tau = taunext;
    L = Lnext;
  }

  res.hit_iter_cap = true;
  res.y = y;
  res.L = L;
  res.iters = cfg.max_iter;
  res.A_final = A;
  res.tau_final = tau;
  return res;
}

// Composite objective for minimizing ψ_s over a Frobenius ball of the given
// radius: ψ_n is the indicator, whose prox is a gradient step followed by the
// ball projection.
template <class S>
CompositeObjective<S> ball_composite(std::function<double(const Mat<S>&)> value,
                                     std::function<Mat<S>(const Mat<S>&)> grad,
                                     double radius) {
  CompositeObjective<S> obj;
  obj.smooth_value = std::move(value);
  obj.smooth_grad = std::move(grad);
  obj.prox = [radius](const Mat<S>& z, const Mat<S>& g, double L) {
    return project_ball<S>(z - g / L, radius);
  };
  return obj;
}

}  // namespace lrsdp

#pragma once
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrsdp/core/types.hpp"
#include "lrsdp/solver/fista.hpp"

namespace lrsdp {

// Smooth objective on the factor ball: g̃(Y) = g(YYᴴ) with its gradient
// 2∇g(YYᴴ)Y, minimized over ‖Y‖_F ≤ radius.
template <class S>
struct FactoredObjective {
  std::function<double(const Mat<S>&)> value;
  std::function<Mat<S>(const Mat<S>&)> grad;
  double radius = 1.0;
};

struct ProxPointConfig {
  double lambda0 = 1.0;
  double rho = 1e-6;       // target stationarity residual ‖R̄‖_F
  double sigma = 0.3;      // universal relative-error parameter, in (0, 1/2)
  double chi = 0.01;       // universal divergence-test parameter, in (0, 1)
  double warm_M = 1.0;     // initial curvature memory (≥ 1)
  long max_outer = 100000;
  long fista_max_iter = 1000000;
};

template <class S>
struct ProxPointResult {
  Mat<S> W;            // ρ̄-approximate stationary point
  Mat<S> R;            // residual: R ∈ ∇g̃(W) + ∂δ_ball(W), ‖R‖_F ≤ ρ̄
  double lambda_final = 0;
  double M_final = 1;  // final curvature memory, reusable as warm_M
  long iterations = 0;
  long fista_calls = 0;
  long fista_iters_total = 0;
  long halvings = 0;
  double g_init = 0, g_final = 0;
  // Per accepted iteration: prox stepsize, residual norm, objective value,
  // inner residual norm ‖V_j‖, and step length ‖W_j − W_{j−1}‖.
  std::vector<double> lambda_trace, residual_trace, g_trace, v_norm_trace,
      step_norm_trace;
};

// Thrown when the outer iteration cap is exceeded. Carries the partially
// filled result at the most stationary iterate reached: every accepted
// iterate descends, so a caller can keep going from that point without
// losing the progress the truncated run made.
template <class S>
struct ProxPointIterCap : std::runtime_error {
  ProxPointResult<S> partial;  // W/R/λ/M̄/g and counters at the best iterate
  double best_residual;
  ProxPointIterCap(ProxPointResult<S> p, double r)
      : std::runtime_error(
            "proximal point method hit its outer iteration cap; best residual " +
            std::to_string(r)),
        partial(std::move(p)),
        best_residual(r) {}
};

// Inexact proximal point descent over the factor ball. Each iteration solves
// the prox subproblem min λ·g̃ + ½‖·−W_{j−1}‖² over the ball with the
// adaptive accelerated method, halving λ whenever that solver fails or the
// accepted point violates the prox descent inequality. Stops once the
// stationarity residual R_j = (V_j + W_{j−1} − W_j)/λ_j has norm ≤ rho.
template <class S>
ProxPointResult<S> prox_point_solve(const FactoredObjective<S>& obj,
                                    const Mat<S>& W_init,
                                    const ProxPointConfig& cfg) {
  require(cfg.lambda0 > 0, "lambda0 must be positive");
  require(cfg.rho > 0, "rho must be positive");
  require(cfg.sigma > 0 && cfg.sigma < 0.5, "sigma must lie in (0, 1/2)");
  require(cfg.warm_M >= 1.0, "warm curvature memory must be at least 1");
  require(W_init.norm() <= obj.radius * (1.0 + 1e-12),
          "W_init must lie in the factor ball");

  ProxPointResult<S> res;
  Mat<S> Wprev = W_init;
  double g_prev = obj.value(Wprev);
  res.g_init = g_prev;

  double lambda = cfg.lambda0;
  double Mbar = cfg.warm_M;
  double best_residual = std::numeric_limits<double>::infinity();
  Mat<S> best_W = Wprev;
  Mat<S> best_R = Mat<S>::Zero(W_init.rows(), W_init.cols());
  double best_lambda = lambda, best_g = g_prev;

  for (long j = 1; j <= cfg.max_outer; ++j) {
    const double Mlow = std::max(1.0, Mbar / 2.0);

    Mat<S> W, V;
    double gW = 0;
    while (true) {
      CompositeObjective<S> sub;
      const double lam = lambda;
      const Mat<S>* anchor = &Wprev;
      sub.smooth_value = [&obj, lam, anchor](const Mat<S>& u) {
        return lam * obj.value(u) + 0.5 * (u - *anchor).squaredNorm();
      };
      sub.smooth_grad = [&obj, lam, anchor](const Mat<S>& u) {
        return Mat<S>(lam * obj.grad(u) + (u - *anchor));
      };
      const double radius = obj.radius;
      sub.prox = [radius](const Mat<S>& z, const Mat<S>& g, double L) {
        return project_ball<S>(z - g / L, radius);
      };

      FistaConfig fcfg;
      fcfg.mu = 0.5;
      fcfg.L0 = std::max(Mlow, 0.5 * (1.0 + 1e-12));  // L0 must exceed mu
      fcfg.sigma = cfg.sigma;
      fcfg.chi = cfg.chi;
      fcfg.max_iter = cfg.fista_max_iter;
      auto fres = fista_solve(sub, Wprev, fcfg);
      ++res.fista_calls;
      res.fista_iters_total += fres.iters;

      if (fres.success) {
        gW = obj.value(fres.y);
        const double half_d2 = 0.5 * (fres.y - Wprev).squaredNorm();
        const double lhs = lambda * (g_prev - gW) - half_d2;
        const double rhs = rdot(fres.v, Wprev - fres.y);
        // The descent test below FP resolution of its operands is vacuous:
        // without the noise floor, cancellation error in λ(g̃_prev − g̃_W)
        // near stationary points triggers spurious rejections and a stepsize
        // collapse.
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                             (lambda * (std::abs(g_prev) + std::abs(gW)) +
                              half_d2 + std::abs(rhs));
        if (lhs >= rhs - noise) {
          W = std::move(fres.y);
          V = std::move(fres.v);
          Mbar = fres.L;
          break;
        }
      }
      lambda /= 2.0;
      ++res.halvings;
      if (lambda < 1e-250)
        throw std::runtime_error("prox stepsize underflow: subproblems never accepted");
    }

    Mat<S> R = (V + Wprev - W) / lambda;
    const double rnorm = R.norm();
    if (rnorm < best_residual) {
      best_residual = rnorm;
      best_W = W;
      best_R = R;
      best_lambda = lambda;
      best_g = gW;
    }
    res.lambda_trace.push_back(lambda);
    res.residual_trace.push_back(rnorm);
    res.g_trace.push_back(gW);
    res.v_norm_trace.push_back(V.norm());
    res.step_norm_trace.push_back((W - Wprev).norm());
    res.iterations = j;

    if (rnorm <= cfg.rho) {
      res.W = std::move(W);
      res.R = std::move(R);
      res.lambda_final = lambda;
      res.M_final = Mbar;
      res.g_final = gW;
      return res;
    }
    Wprev = std::move(W);
    g_prev = gW;
  }
  res.W = std::move(best_W);
  res.R = std::move(best_R);
  res.lambda_final = best_lambda;
  res.M_final = Mbar;
  res.g_final = best_g;
  throw ProxPointIterCap<S>(std::move(res), best_residual);
}

}  // namespace lrsdp

#pragma once
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrsdp/core/lanczos.hpp"
#include "lrsdp/core/spectraplex.hpp"
#include "lrsdp/core/types.hpp"
#include "lrsdp/solver/prox_point.hpp"

namespace lrsdp {

// Objective over the trace-tau spectraplex, presented in factored form: the
// solver only ever evaluates g through a factor Y (Z = YYᴴ) and touches the
// gradient through a self-adjoint operator.
template <class S>
struct SpectraplexObjective {
  double tau = 1.0;
  std::function<double(const Mat<S>&)> value_on_factor;       // Y ↦ g(YYᴴ)
  std::function<LinOp<S>(const Mat<S>&)> grad_operator;       // Y ↦ ∇g(YYᴴ)
  // Exact minimizer of α ↦ g((1−α)YYᴴ + α·V) over [0,1], where V = τ·y yᴴ
  // when the vertex pointer is non-null and V = 0 otherwise.
  std::function<double(const Mat<S>&, const Vec<S>*)> linesearch;
  std::optional<double> L_g;  // smoothness constant hint for diagnostics
};

// Guarded golden-section line search on [0,1]; exact enough for the generic
// path (the augmented Lagrangian path installs a closed form instead).
template <class S>
std::function<double(const Mat<S>&, const Vec<S>*)> make_golden_linesearch(
    std::function<double(const Mat<S>&)> value_on_factor, double tau) {
  return [value_on_factor, tau](const Mat<S>& Y, const Vec<S>* y) {
    auto eval = [&](double alpha) {
      Mat<S> T;
      if (alpha >= 1.0) {
        if (y == nullptr) {
          T = Mat<S>::Zero(Y.rows(), 1);
        } else {
          T = std::sqrt(tau) * (*y);
        }
      } else {
        const double shrink = std::sqrt(1.0 - alpha);
        if (y == nullptr) {
          T = shrink * Y;
        } else {
          T.resize(Y.rows(), Y.cols() + 1);
          T.leftCols(Y.cols()) = shrink * Y;
          T.col(Y.cols()) = std::sqrt(alpha * tau) * (*y);
        }
      }
      return value_on_factor(T);
    };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = eval(c), fd = eval(d);
    while (b - a > 1e-12) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = eval(d);
      }
    }
    const double mid = 0.5 * (a + b);
    double best = mid, fbest = eval(mid);
    for (double cand : {0.0, 1.0}) {
      const double f = eval(cand);
      if (f < fbest) {
        fbest = f;
        best = cand;
      }
    }
    return best;
  };
}

// Frank-Wolfe escape step: combines the current factor with the vertex
// τ·y yᴴ (or the zero matrix when y is null) so that the new Gram matrix is
// exactly (1−α)YYᴴ + α·vertex. α = 1 resets the rank to one.
template <class S>
Mat<S> fw_escape(const Mat<S>& Y, const Vec<S>* y, double alpha, double tau) {
  require(alpha >= 0.0 && alpha <= 1.0, "stepsize must lie in [0,1]");
  if (alpha == 0.0) return Y;
  if (alpha == 1.0) {
    if (y == nullptr) return Mat<S>::Zero(Y.rows(), 1);
    return Mat<S>(std::sqrt(tau) * (*y));
  }
  const double shrink = std::sqrt(1.0 - alpha);
  if (y == nullptr) return Mat<S>(shrink * Y);
  Mat<S> out(Y.rows(), Y.cols() + 1);
  out.leftCols(Y.cols()) = shrink * Y;
  out.col(Y.cols()) = std::sqrt(alpha * tau) * (*y);
  return out;
}

// Rebuilds the factor with numerically independent columns via the s×s Gram
// eigendecomposition; the represented matrix YYᴴ changes by at most
// tol·‖YYᴴ‖_F in Frobenius norm.
template <class S>
Mat<S> recompress(const Mat<S>& Y, double tol) {
  const Eigen::Index s = Y.cols();
  Mat<S> M = Y.adjoint() * Y;
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(M);
  if (es.info() != Eigen::Success) return Y;
  const auto& lam = es.eigenvalues();  // ascending
  const double total = M.norm();
  double dropped_sq = 0;
  Eigen::Index first_kept = 0;
  while (first_kept < s - 1) {
    const double l = std::max(lam(first_kept), 0.0);
    if (std::sqrt(dropped_sq + l * l) > tol * total) break;
    dropped_sq += l * l;
    ++first_kept;
  }
  if (first_kept == 0) return Y;
  return Mat<S>(Y * es.eigenvectors().rightCols(s - first_kept));
}

struct HybridConfig {
  double eps_bar = 1e-6;   // target optimality gap over the spectraplex
  double rho = 1e-8;       // stationarity target for each descent phase
  double lambda0 = 1.0;    // initial prox stepsize, re-seeded every phase
  double sigma = 0.3;
  double chi = 0.01;
  long max_iters = 10000;
  EigConfig eig;
  // Recompression bounds column growth; s_trigger < 0 disables it.
  int s_trigger = -1;
  double recompress_tol = 1e-12;
  ProxPointConfig prox;  // caps forwarded to the descent phases
};

template <class S>
struct HybridIterCap : std::runtime_error {
  Mat<S> best_Y;
  double best_eps;
  HybridIterCap(Mat<S> Y, double eps)
      : std::runtime_error("hybrid solver hit its iteration cap; best gap " +
                           std::to_string(eps)),
        best_Y(std::move(Y)),
        best_eps(eps) {}
};

template <class S>
struct HybridResult {
  Mat<S> Y;               // ε̄-optimal factor
  double theta = 0;       // dual eigenvalue shift at the certificate
  double eps_final = 0;   // certified optimality gap (≤ eps_bar)
  long iters = 0;         // = number of minimum-eigenpair computations
  double M_warm = 1.0;    // final curvature memory
  // aggregated descent-phase counters
  long aipp_iters = 0, fista_calls = 0, fista_iters = 0, halvings = 0;
  long prox_caps = 0;  // descent phases truncated at their iteration cap
  std::vector<int> rank_history;           // s after each iteration
  std::vector<double> g_iterate_trace;     // g after each descent phase
  std::vector<double> g_escape_trace;      // g after the following escape
  std::vector<double> alpha_trace;         // escape stepsizes taken
};

namespace detail {

// Factored-space adapter: gradient of Y ↦ g(YYᴴ) is 2·∇g(YYᴴ)·Y.
template <class S>
FactoredObjective<S> factored_view(const SpectraplexObjective<S>& obj) {
  FactoredObjective<S> f;
  f.radius = std::sqrt(obj.tau);
  f.value = obj.value_on_factor;
  const SpectraplexObjective<S>* o = &obj;
  f.grad = [o](const Mat<S>& Y) {
    LinOp<S> op = o->grad_operator(Y);
    Mat<S> out(Y.rows(), Y.cols());
    for (Eigen::Index j = 0; j < Y.cols(); ++j) out.col(j) = op.apply(Y.col(j));
    return Mat<S>(2.0 * out);
  };
  return f;
}

// One budget-doubling retry before the eigensolver failure propagates.
template <class S>
FwVertexResult<S> vertex_with_retry(const LinOp<S>& op, double tau,
                                    const EigConfig& cfg) {
  try {
    return fw_vertex<S>(op, tau, cfg);
  } catch (const EigNonConverged&) {
    EigConfig retry = cfg;
    retry.max_matvecs *= 2;
    return fw_vertex<S>(op, tau, retry);
  }
}

}  // namespace detail

// Hybrid low-rank minimization of g over the trace-tau spectraplex:
// alternates inexact proximal-point descent in the factored ball with
// minimum-eigenpair certificate checks, taking an exact-linesearch
// Frank-Wolfe step whenever the certificate fails. Returns a factor whose
// optimality gap (G Y)•Y + τθ is at most eps_bar.
template <class S>
HybridResult<S> hybrid_minimize(const SpectraplexObjective<S>& obj,
                                const Mat<S>& Y0, const HybridConfig& cfg) {
  require(cfg.eps_bar > 0, "gap target must be positive");
  require(Y0.norm() <= std::sqrt(obj.tau) * (1.0 + 1e-12),
          "Y0 must lie in the factor ball");

  HybridResult<S> res;
  FactoredObjective<S> fobj = detail::factored_view(obj);

  Mat<S> Z = Y0;
  double warm_M = std::max(1.0, cfg.prox.warm_M);
  double best_eps = std::numeric_limits<double>::infinity();
  Mat<S> best_Y = Y0;

  for (long k = 1; k <= cfg.max_iters; ++k) {
    ProxPointConfig pcfg = cfg.prox;
    pcfg.lambda0 = cfg.lambda0;
    pcfg.rho = cfg.rho;
    pcfg.sigma = cfg.sigma;
    pcfg.chi = cfg.chi;
    pcfg.warm_M = warm_M;
    ProxPointResult<S> aipp;
    try {
      aipp = prox_point_solve(fobj, Z, pcfg);
    } catch (ProxPointIterCap<S>& cap) {
      // The descent phase ran out of iterations short of ρ̄-stationarity.
      // Its best iterate still descended from Z, so the certificate check
      // and escape step below remain valid; continue from that point.
      aipp = std::move(cap.partial);
      ++res.prox_caps;
    }
    warm_M = aipp.M_final;
    res.aipp_iters += aipp.iterations;
    res.fista_calls += aipp.fista_calls;
    res.fista_iters += aipp.fista_iters_total;
    res.halvings += aipp.halvings;

    Mat<S> Y = std::move(aipp.W);
    res.g_iterate_trace.push_back(aipp.g_final);

    LinOp<S> G = obj.grad_operator(Y);
    auto vert = detail::vertex_with_retry<S>(G, obj.tau, cfg.eig);
    res.iters = k;
    double eps = optimality_gap<S>(G, Y, vert.theta, obj.tau);
    if (eps < 0) eps = 0;  // eigensolver noise; certificate re-checked by callers
    if (eps < best_eps) {
      best_eps = eps;
      best_Y = Y;
    }
    res.rank_history.push_back(static_cast<int>(Y.cols()));

    if (eps <= cfg.eps_bar) {
      res.Y = std::move(Y);
      res.theta = vert.theta;
      res.eps_final = eps;
      res.M_warm = warm_M;
      return res;
    }

    const Vec<S>* ydir = vert.y ? &*vert.y : nullptr;
    const double alpha = obj.linesearch(Y, ydir);
    require(alpha >= 0.0 && alpha <= 1.0, "linesearch left [0,1]");
    Mat<S> Yt = fw_escape<S>(Y, ydir, alpha, obj.tau);
    res.alpha_trace.push_back(alpha);
    res.g_escape_trace.push_back(obj.value_on_factor(Yt));

    if (cfg.s_trigger >= 0 && Yt.cols() > cfg.s_trigger)
      Yt = recompress<S>(Yt, cfg.recompress_tol);
    Z = std::move(Yt);
  }
  throw HybridIterCap<S>(std::move(best_Y), best_eps);
}

}  // namespace lrsdp

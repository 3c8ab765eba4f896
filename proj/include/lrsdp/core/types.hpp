#pragma once
#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace lrsdp {

using Real = double;
using Complex = std::complex<double>;

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
using RealVec = Vec<Real>;
using RealMat = Mat<Real>;

template <class S>
inline constexpr bool is_complex_v = !std::is_same_v<S, Real>;

// Real inner product Re tr(Aᴴ B); the inner product used throughout.
template <class DA, class DB>
Real rdot(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return std::real(a.conjugate().cwiseProduct(b.derived()).sum());
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Tall factor Y (n x s) representing X = Y Yᴴ with tr X = ‖Y‖_F² ≤ trace_cap.
template <class S>
struct LowRankFactor {
  Mat<S> Y;
  double trace_cap = 1.0;

  Eigen::Index n() const { return Y.rows(); }
  Eigen::Index s() const { return Y.cols(); }
  double frob() const { return Y.norm(); }
};

template <class S>
void check_factor(const LowRankFactor<S>& f) {
  require(f.s() >= 1, "factor must have at least one column");
  require(f.Y.allFinite(), "factor entries must be finite");
  require(f.frob() <= std::sqrt(f.trace_cap) + 1e-12,
          "factor violates the trace-cap ball constraint");
}

// Matrix-free description of  min C•X  s.t.  A X = b,  tr X ≤ tau,  X ⪰ 0.
// All constraint values are real; matrices over S are implicitly Hermitian.
template <class S>
struct SdpProblem {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  double tau = 1.0;
  RealVec b;
  std::function<Vec<S>(const Vec<S>&)> c_apply;                    // v ↦ C v
  std::function<Vec<S>(const RealVec&, const Vec<S>&)> adjoint_apply;  // (p,v) ↦ (A*p) v
  std::function<RealVec(const Vec<S>&)> q_A;                       // y ↦ A(y yᴴ)
  double objective_scale = 1.0;  // reported user objective = objective_scale · (C•X)
  std::string kind;
};

// A(Y Yᴴ) = Σ_cols q_A(y_j): linear in the Gram matrix.
template <class S>
RealVec apply_constraints(const SdpProblem<S>& P, const Mat<S>& Y) {
  require(Y.rows() == P.n, "factor dimension does not match problem");
  RealVec out = RealVec::Zero(P.m);
  for (Eigen::Index j = 0; j < Y.cols(); ++j) out += P.q_A(Y.col(j));
  return out;
}

template <class S>
Real objective_value(const SdpProblem<S>& P, const Mat<S>& Y) {
  Real val = 0;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) val += rdot(Y.col(j), P.c_apply(Y.col(j)));
  return val;
}

// Self-adjoint operator closure.
template <class S>
struct LinOp {
  Eigen::Index n = 0;
  std::function<Vec<S>(const Vec<S>&)> apply;
};

// Operator v ↦ (C + A*(q)) v with q = p + β(A(Y Yᴴ) − b) computed once and
// cached; q is exposed because it is also the augmented-Lagrangian multiplier
// candidate at Y.
template <class S>
struct GradientOp {
  LinOp<S> op;
  RealVec q;
};

template <class S>
GradientOp<S> gradient_operator(const SdpProblem<S>& P, const RealVec& p, double beta,
                                const Mat<S>& Y) {
  require(p.size() == P.m, "multiplier dimension does not match problem");
  require(beta >= 0, "penalty must be nonnegative");
  RealVec q = p;
  if (beta != 0.0) q += beta * (apply_constraints(P, Y) - P.b);
  auto c = P.c_apply;
  auto adj = P.adjoint_apply;
  LinOp<S> op{P.n, [c, adj, q](const Vec<S>& v) { return (c(v) + adj(q, v)).eval(); }};
  return {std::move(op), std::move(q)};
}

// Scale into the Frobenius ball of radius r; identity when already inside.
template <class S>
Mat<S> project_ball(const Mat<S>& Y, double r) {
  require(r > 0, "ball radius must be positive");
  double nrm = Y.norm();
  if (nrm <= r * (1.0 + 1e-13)) return Y;  // slack keeps the projection idempotent
  return (r / nrm) * Y;
}

template <class S>
struct EigResult {
  double lambda = 0;
  Vec<S> v;
  double residual = 0;  // ‖op(v) − λ v‖ computed explicitly
  int matvecs = 0;
  bool converged = false;
};

class EigNonConverged : public std::runtime_error {
 public:
  double best_residual;
  explicit EigNonConverged(double r)
      : std::runtime_error("eigensolver did not reach the requested residual"),
        best_residual(r) {}
};

}  // namespace lrsdp

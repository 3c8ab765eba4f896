#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "lrsdp/core/lanczos.hpp"
#include "lrsdp/core/rng.hpp"
#include "lrsdp/core/spectraplex.hpp"
#include "lrsdp/core/types.hpp"

using namespace lrsdp;
using testutil::DenseToy;
using testutil::dense_min_eig;
using testutil::dense_min_linear_form;
using testutil::random_factor;
using testutil::random_hermitian;
using testutil::random_toy;
using testutil::two_by_two_toy;

TEST_CASE("rng determinism and distribution sanity") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.bits() == b.bits());

  Rng r(7);
  double sum = 0, sumsq = 0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    double x = r.normal();
    sum += x;
    sumsq += x * x;
  }
  REQUIRE(std::abs(sum / N) < 0.05);
  REQUIRE(std::abs(sumsq / N - 1.0) < 0.05);

  Rng u(3);
  for (int i = 0; i < 1000; ++i) {
    auto k = u.uniform_below(17);
    REQUIRE(k < 17);
  }
}

TEST_CASE("apply_constraints matches hand evaluation and dense oracle") {
  auto toy = two_by_two_toy();
  auto P = toy.to_problem();

  SECTION("rank-1 basis factor") {
    Mat<Real> Y = Mat<Real>::Zero(2, 1);
    Y(0, 0) = 1;
    RealVec v = apply_constraints(P, Y);
    REQUIRE(v[0] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(v[1] == Catch::Approx(1.0).margin(1e-15));
  }

  SECTION("zero factor gives zero constraints") {
    Mat<Real> Y = Mat<Real>::Zero(2, 3);
    REQUIRE(apply_constraints(P, Y).norm() == 0.0);
  }

  SECTION("random 8x3 factor vs dense Gram evaluation, real and complex") {
    Rng rng(11);
    auto T = random_toy<Real>(8, 5, 1.0, rng);
    auto Pr = T.to_problem();
    Mat<Real> Y = random_factor<Real>(8, 3, rng);
    RealVec lhs = apply_constraints(Pr, Y);
    RealVec rhs = T.eval_constraints(Y * Y.transpose());
    REQUIRE((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));

    auto Tc = random_toy<Complex>(8, 5, 1.0, rng);
    auto Pc = Tc.to_problem();
    Mat<Complex> Yc = random_factor<Complex>(8, 3, rng);
    RealVec lhsc = apply_constraints(Pc, Yc);
    RealVec rhsc = Tc.eval_constraints((Yc * Yc.adjoint()).eval());
    REQUIRE((lhsc - rhsc).norm() <= 1e-10 * std::max(1.0, rhsc.norm()));
  }

  SECTION("dimension mismatch rejected") {
    Mat<Real> Y = Mat<Real>::Zero(3, 1);
    REQUIRE_THROWS_AS(apply_constraints(P, Y), std::invalid_argument);
  }
}

TEST_CASE("q_A scaling law and adjoint identity") {
  Rng rng(5);
  auto T = random_toy<Complex>(6, 4, 1.0, rng);
  auto P = T.to_problem();
  for (int trial = 0; trial < 100; ++trial) {
    Vec<Complex> y = random_factor<Complex>(6, 1, rng).col(0);
    Complex alpha = rng.cnormal();
    RealVec q1 = P.q_A((alpha * y).eval());
    RealVec q2 = std::norm(alpha) * P.q_A(y);
    REQUIRE((q1 - q2).norm() <= 1e-10 * std::max(1.0, q2.norm()));

    RealVec p = RealVec::NullaryExpr(4, [&](Eigen::Index) { return rng.normal(); });
    double lhs = P.q_A(y).dot(p);
    double rhs = std::real(y.dot(P.adjoint_apply(p, y)));
    REQUIRE(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("gradient_operator caches q and matches dense assembly") {
  auto toy = two_by_two_toy();
  auto P = toy.to_problem();

  SECTION("beta = 0, p = 0 reduces to the cost operator") {
    Mat<Real> Y = Mat<Real>::Identity(2, 1);
    auto g = gradient_operator(P, RealVec::Zero(2), 0.0, Y);
    for (int i = 0; i < 2; ++i) {
      Vec<Real> e = Vec<Real>::Zero(2);
      e[i] = 1;
      REQUIRE((g.op.apply(e) - P.c_apply(e)).norm() == 0.0);
    }
  }

  SECTION("toy instance against dense C + A*(p + beta(A(X) − b))") {
    Mat<Real> Y = Mat<Real>::Zero(2, 1);
    Y(0, 0) = 1;
    RealVec p(2);
    p << 1, 0;
    auto g = gradient_operator(P, p, 1.0, Y);
    Mat<Real> Gd = toy.al_gradient(Y * Y.transpose(), p, 1.0);
    for (int i = 0; i < 2; ++i) {
      Vec<Real> e = Vec<Real>::Zero(2);
      e[i] = 1;
      REQUIRE((g.op.apply(e) - Gd * e).norm() <= 1e-14);
    }
  }

  SECTION("factored gradient 2 G Y matches finite differences of the AL value") {
    Rng rng(23);
    auto T = random_toy<Real>(6, 4, 1.0, rng);
    auto Pr = T.to_problem();
    Mat<Real> Y = 0.3 * random_factor<Real>(6, 2, rng);
    RealVec p = RealVec::NullaryExpr(4, [&](Eigen::Index) { return rng.normal(); });
    double beta = 0.7;
    auto g = gradient_operator(Pr, p, beta, Y);
    Mat<Real> GY(6, 2);
    for (int j = 0; j < 2; ++j) GY.col(j) = g.op.apply(Y.col(j));
    for (int probe = 0; probe < 5; ++probe) {
      Mat<Real> E = random_factor<Real>(6, 2, rng);
      double h = 1e-5;
      double fp = T.al_value((Y + h * E) * (Y + h * E).transpose(), p, beta);
      double fm = T.al_value((Y - h * E) * (Y - h * E).transpose(), p, beta);
      double fd = (fp - fm) / (2 * h);
      double an = rdot(2.0 * GY, E);
      REQUIRE(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
  }

  SECTION("complex field finite differences") {
    Rng rng(29);
    auto T = random_toy<Complex>(5, 3, 1.0, rng);
    auto Pc = T.to_problem();
    Mat<Complex> Y = 0.3 * random_factor<Complex>(5, 2, rng);
    RealVec p = RealVec::NullaryExpr(3, [&](Eigen::Index) { return rng.normal(); });
    double beta = 0.4;
    auto g = gradient_operator(Pc, p, beta, Y);
    Mat<Complex> GY(5, 2);
    for (int j = 0; j < 2; ++j) GY.col(j) = g.op.apply(Y.col(j));
    for (int probe = 0; probe < 5; ++probe) {
      Mat<Complex> E = random_factor<Complex>(5, 2, rng);
      double h = 1e-5;
      auto val = [&](const Mat<Complex>& W) {
        return T.al_value((W * W.adjoint()).eval(), p, beta);
      };
      double fd = (val(Y + h * E) - val(Y - h * E)) / (2 * h);
      double an = rdot((2.0 * GY).eval(), E);
      REQUIRE(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("minimum eigenpair on analytic instances") {
  SECTION("diagonal") {
    Mat<Real> D = Mat<Real>::Zero(3, 3);
    D.diagonal() << 1, 2, 3;
    EigConfig cfg;
    cfg.seed = 1;
    auto r = min_eigenpair<Real>([&](const Vec<Real>& v) { return (D * v).eval(); }, 3, cfg);
    REQUIRE(r.converged);
    REQUIRE(std::abs(r.lambda - 1.0) <= 1e-10);
    REQUIRE(std::abs(std::abs(r.v[0]) - 1.0) <= 1e-8);
  }

  SECTION("2x2 exchange matrix") {
    Mat<Real> X(2, 2);
    X << 0, 1, 1, 0;
    EigConfig cfg;
    cfg.seed = 2;
    auto r = min_eigenpair<Real>([&](const Vec<Real>& v) { return (X * v).eval(); }, 2, cfg);
    REQUIRE(r.converged);
    REQUIRE(std::abs(r.lambda + 1.0) <= 1e-10);
    REQUIRE(std::abs(std::abs(r.v[0] - r.v[1]) - std::sqrt(2.0)) <= 1e-7);
  }
}

TEST_CASE("minimum eigenpair vs dense oracle, both fields") {
  Rng rng(101);
  SECTION("real 20x20") {
    Mat<Real> G = random_hermitian<Real>(20, rng);
    auto [lam, v] = dense_min_eig(G);
    EigConfig cfg;
    cfg.seed = 3;
    cfg.tol = 1e-10;
    auto r = min_eigenpair<Real>([&](const Vec<Real>& x) { return (G * x).eval(); }, 20, cfg);
    REQUIRE(r.converged);
    REQUIRE(std::abs(r.lambda - lam) <= 1e-8);
  }

  SECTION("complex Hermitian 20x20") {
    Mat<Complex> G = random_hermitian<Complex>(20, rng);
    auto [lam, v] = dense_min_eig(G);
    EigConfig cfg;
    cfg.seed = 4;
    auto r =
        min_eigenpair<Complex>([&](const Vec<Complex>& x) { return (G * x).eval(); }, 20, cfg);
    REQUIRE(r.converged);
    REQUIRE(std::abs(r.lambda - lam) <= 1e-8);
  }

  SECTION("thick restarts engaged on n=60 with basis 12") {
    Mat<Real> G = random_hermitian<Real>(60, rng);
    auto [lam, v] = dense_min_eig(G);
    EigConfig cfg;
    cfg.seed = 5;
    cfg.basis = 12;
    cfg.thick = 4;
    auto r = min_eigenpair<Real>([&](const Vec<Real>& x) { return (G * x).eval(); }, 60, cfg);
    REQUIRE(r.converged);
    REQUIRE(std::abs(r.lambda - lam) <= 1e-8);
    REQUIRE(r.residual <= cfg.tol * std::max(1.0, std::abs(r.lambda)) * 1.0001);
  }

  SECTION("degenerate minimum eigenvalue") {
    Mat<Real> G = -Mat<Real>::Identity(12, 12);
    EigConfig cfg;
    cfg.seed = 6;
    auto r = min_eigenpair<Real>([&](const Vec<Real>& x) { return (G * x).eval(); }, 12, cfg);
    REQUIRE(r.converged);
    REQUIRE(std::abs(r.lambda + 1.0) <= 1e-10);
  }

  SECTION("zero operator") {
    EigConfig cfg;
    cfg.seed = 7;
    auto r = min_eigenpair<Real>([&](const Vec<Real>& x) { return (0.0 * x).eval(); }, 5, cfg);
    REQUIRE(r.converged);
    REQUIRE(std::abs(r.lambda) <= 1e-12);
  }
}

TEST_CASE("minimum eigenpair determinism and failure reporting") {
  Rng rng(55);
  Mat<Real> G = random_hermitian<Real>(25, rng);
  auto op = [&](const Vec<Real>& x) { return (G * x).eval(); };
  EigConfig cfg;
  cfg.seed = 99;
  auto r1 = min_eigenpair<Real>(op, 25, cfg);
  auto r2 = min_eigenpair<Real>(op, 25, cfg);
  REQUIRE(r1.converged);
  REQUIRE(r1.lambda == r2.lambda);
  REQUIRE((r1.v - r2.v).norm() == 0.0);

  EigConfig tiny = cfg;
  tiny.max_matvecs = 3;
  tiny.tol = 1e-14;
  auto rf = min_eigenpair<Real>(op, 25, tiny);
  REQUIRE_FALSE(rf.converged);
  REQUIRE(std::isfinite(rf.residual));
  REQUIRE_THROWS_AS(min_eigenpair_checked<Real>(op, 25, tiny), EigNonConverged);
}

TEST_CASE("operator norm estimate") {
  Mat<Real> D = Mat<Real>::Zero(4, 4);
  D.diagonal() << -3, 0.5, 1, 2;
  double est = estimate_op_norm<Real>([&](const Vec<Real>& v) { return (D * v).eval(); }, 4);
  REQUIRE(est <= 3.0 + 1e-9);
  REQUIRE(est >= 2.0);
}

TEST_CASE("project_ball") {
  Rng rng(13);
  Mat<Real> Y = random_factor<Real>(4, 2, rng);
  Y *= 2.0 / Y.norm();
  Mat<Real> P1 = project_ball(Y, 1.0);
  REQUIRE(std::abs(P1.norm() - 1.0) <= 1e-12);
  REQUIRE((P1 - Y / 2.0).norm() <= 1e-12);

  Mat<Real> Ysmall = Y * 0.25;  // norm 0.5
  REQUIRE((project_ball(Ysmall, 1.0) - Ysmall).norm() == 0.0);

  Mat<Complex> Yc = random_factor<Complex>(3, 2, rng);
  Yc *= 3.0 / Yc.norm();
  Mat<Complex> Pc = project_ball(Yc, std::sqrt(2.0));
  REQUIRE(std::abs(Pc.norm() - std::sqrt(2.0)) <= 1e-12);

  // idempotent
  REQUIRE((project_ball(P1, 1.0) - P1).norm() == 0.0);
}

TEST_CASE("Frank-Wolfe vertex") {
  SECTION("positive semidefinite operator gives the zero vertex") {
    LinOp<Real> op{3, [](const Vec<Real>& v) { return v; }};
    EigConfig cfg;
    cfg.seed = 8;
    auto r = fw_vertex<Real>(op, 1.0, cfg);
    REQUIRE(r.theta == 0.0);
    REQUIRE_FALSE(r.y.has_value());
  }

  SECTION("diag(-2, 1)") {
    Mat<Real> D = Mat<Real>::Zero(2, 2);
    D.diagonal() << -2, 1;
    LinOp<Real> op{2, [D](const Vec<Real>& v) { return (D * v).eval(); }};
    EigConfig cfg;
    cfg.seed = 9;
    auto r = fw_vertex<Real>(op, 1.0, cfg);
    REQUIRE(std::abs(r.theta - 2.0) <= 1e-9);
    REQUIRE(r.y.has_value());
    REQUIRE(std::abs(std::abs((*r.y)[0]) - 1.0) <= 1e-7);
  }

  SECTION("random instances vs dense eigendecomposition") {
    Rng rng(77);
    for (int trial = 0; trial < 8; ++trial) {
      double tau = (trial % 2 == 0) ? 1.0 : 2.5;
      Mat<Real> G = random_hermitian<Real>(15, rng);
      auto [lam, vd] = dense_min_eig(G);
      LinOp<Real> op{15, [G](const Vec<Real>& v) { return (G * v).eval(); }};
      EigConfig cfg;
      cfg.seed = 100 + static_cast<std::uint64_t>(trial);
      auto r = fw_vertex<Real>(op, tau, cfg);
      double theta_d = std::max(-lam, 0.0);
      REQUIRE(std::abs(r.theta - theta_d) <= 1e-8 * std::max(1.0, std::abs(theta_d)));
      REQUIRE(r.theta >= 0.0);
      REQUIRE(lam + r.theta >= -1e-8 * std::max(1.0, G.norm()));
      if (r.y.has_value()) {
        // vertex value identity: G•(tau y yᴴ) = −tau θ
        double form = tau * std::real(r.y->dot(G * (*r.y)));
        REQUIRE(std::abs(form + tau * r.theta) <= 1e-7 * std::max(1.0, tau * r.theta));
      }
    }
  }
}

TEST_CASE("optimality gap") {
  Mat<Real> C = Mat<Real>::Zero(2, 2);
  C.diagonal() << -1, 2;
  LinOp<Real> op{2, [C](const Vec<Real>& v) { return (C * v).eval(); }};

  SECTION("at the linear-form optimum the gap is zero") {
    Mat<Real> Y = Mat<Real>::Zero(2, 1);
    Y(0, 0) = 1;
    REQUIRE(optimality_gap(op, Y, 1.0, 1.0) == 0.0);
  }

  SECTION("suboptimal vertex") {
    Mat<Real> Y = Mat<Real>::Zero(2, 1);
    Y(1, 0) = 1;
    REQUIRE(std::abs(optimality_gap(op, Y, 1.0, 1.0) - 3.0) <= 1e-14);
  }

  SECTION("tiny negative values are clamped to zero") {
    Mat<Real> Y = Mat<Real>::Zero(2, 1);
    Y(0, 0) = 1;
    REQUIRE(optimality_gap(op, Y, 1.0 - 1e-13, 1.0) == 0.0);
  }

  SECTION("random pairs match the dense vertex-enumeration oracle") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      double tau = (trial % 2 == 0) ? 1.0 : 3.0;
      Eigen::Index n = 9;
      Mat<Real> G = random_hermitian<Real>(n, rng);
      Mat<Real> Y = random_factor<Real>(n, 3, rng);
      Y = project_ball(Y, std::sqrt(tau) * 0.9);
      auto [lam, vd] = dense_min_eig(G);
      double theta = std::max(-lam, 0.0);
      LinOp<Real> gop{n, [G](const Vec<Real>& v) { return (G * v).eval(); }};
      double gap = optimality_gap(gop, Y, theta, tau);

      Mat<Real> Z = Y * Y.transpose();
      double oracle = rdot(G, Z) - dense_min_linear_form(G, tau);
      REQUIRE(std::abs(gap - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
      REQUIRE(gap >= 0.0);

      // complementary-slackness form equals the gap
      double comp = theta * (tau - Z.trace()) + (rdot(G, Z) + theta * Z.trace());
      REQUIRE(std::abs(comp - gap) <= 1e-8 * std::max(1.0, std::abs(gap)));

      // certificate equivalence: inclusion holds exactly when eps >= gap
      for (double eps : {gap * 0.5, gap + 1e-6 * std::max(1.0, gap)}) {
        bool inclusion = rdot(G, Z) - dense_min_linear_form(G, tau) <= eps + 1e-12;
        REQUIRE(inclusion == (eps >= gap - 1e-12));
      }
    }
  }
}

TEST_CASE("low-rank factor invariants") {
  Rng rng(3);
  LowRankFactor<Real> f{random_factor<Real>(5, 2, rng), 2.0};
  f.Y = project_ball(f.Y, std::sqrt(2.0));
  REQUIRE_NOTHROW(check_factor(f));

  LowRankFactor<Real> bad{f.Y * 10.0, 2.0};
  REQUIRE_THROWS_AS(check_factor(bad), std::invalid_argument);

  LowRankFactor<Real> empty{Mat<Real>(5, 0), 1.0};
  REQUIRE_THROWS_AS(check_factor(empty), std::invalid_argument);
}

#include <doctest.h>

#include "fuchs/ode.hpp"

using namespace fuchs;

TEST_CASE("zero matrix keeps the solution constant") {
  const Matrix2 zero{Expr(), Expr(), Expr(), Expr()};
  const Vec2 y0{cplx(1.0, 2.0), cplx(-0.5, 0.0)};
  const DenseTrace tr = integrate_ode(linear_rhs(zero, Var::x, 0.0), Path{1.0, cplx(2.0, 0.5), 3.0}, y0);
  CHECK(tr.final_value() == y0);
  CHECK(tr.value(0.7) == y0);
}

TEST_CASE("scalar exponential") {
  // phi' = phi at x in [0, 1]: phi(1) = e.
  const Matrix2 m{Expr(1.0), Expr(), Expr(), Expr(-1.0)};
  const DenseTrace tr = integrate_ode(linear_rhs(m, Var::x, 0.0), Path{0.0, 1.0}, {1.0, 1.0}, {1e-12, 1e-14});
  CHECK(std::abs(tr.final_value()[0] - std::exp(1.0)) < 1e-10);
  CHECK(std::abs(tr.final_value()[1] - std::exp(-1.0)) < 1e-10);
  CHECK(std::abs(tr.value(0.5)[0] - std::exp(0.5)) < 1e-9);
}

TEST_CASE("agrees with fixed-step RK4") {
  const Matrix2 m{parse("x^2"), parse("x"), parse("t*x - 1"), parse("-x^2")};
  const OdeRhs f = linear_rhs(m, Var::x, 0.8);
  const Vec2 y0{1.0, 0.5};
  const cplx a = 1.1, b(2.0, 0.3);
  const Vec2 dp = integrate_ode(f, Path{a, b}, y0, {1e-12, 1e-14}).final_value();
  const Vec2 rk = integrate_rk4(f, a, b, y0, 4000);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(dp[i] - rk[i]) <= 1e-8 * (1.0 + std::abs(rk[i])));
}

TEST_CASE("integration in t at fixed x") {
  // dPhi/dt = diag(x t, -x t): Phi = exp(+-x t^2/2).
  const Matrix2 m{parse("x*t"), Expr(), Expr(), parse("-x*t")};
  const cplx x = 1.5;
  const Vec2 y = integrate_ode(linear_rhs(m, Var::t, x), Path{0.0, 1.0}, {1.0, 1.0}, {1e-12, 1e-14}).final_value();
  CHECK(std::abs(y[0] - std::exp(0.75)) < 1e-10);
  CHECK(std::abs(y[1] - std::exp(-0.75)) < 1e-10);
}

TEST_CASE("reversed path returns to the start") {
  const Matrix2 m{parse("x^2"), parse("x"), parse("0.7*x - 1"), parse("-x^2")};
  const OdeRhs f = linear_rhs(m, Var::x, 0.0);
  const Path p{1.1, cplx(1.6, 0.2), 2.2};
  const Vec2 y0{1.0, 0.5};
  const Vec2 y1 = integrate_ode(f, p, y0, {1e-12, 1e-14}).final_value();
  const Vec2 back = integrate_ode(f, p.reversed(), y1, {1e-12, 1e-14}).final_value();
  for (int i = 0; i < 2; ++i) CHECK(std::abs(back[i] - y0[i]) <= 1e-8);
}

TEST_CASE("landing points are hit exactly") {
  const Matrix2 m{parse("x"), Expr(), Expr(), parse("-x")};
  const OdeRhs f = linear_rhs(m, Var::x, 0.0);
  const Path p{0.0, 1.0, 2.0};
  const std::vector<double> land = {0.25, 0.5, 1.75};
  const DenseTrace full = integrate_ode(f, p, {1.0, 1.0}, {1e-12, 1e-14}, land);
  for (double s : land) {
    CHECK(full.point(s) == cplx(s, 0.0));
    const Vec2 direct = integrate_ode(f, Path{0.0, s}, {1.0, 1.0}, {1e-12, 1e-14}).final_value();
    CHECK(std::abs(full.value(s)[0] - direct[0]) < 1e-10);
    CHECK(std::abs(full.value(s)[0] - std::exp(s * s / 2.0)) < 1e-10);
  }
}

TEST_CASE("scalar right-hand side") {
  // phi'' - phi = 0 from phi = 1, phi' = 0: cosh.
  ScalarPair sp;
  sp.q1 = Expr(-1.0);
  sp.p2 = Expr(1.0);
  const Vec2 y = integrate_ode(scalar_rhs(sp, 1.0), Path{0.0, 1.0}, {1.0, 0.0}, {1e-12, 1e-14}).final_value();
  CHECK(std::abs(y[0] - std::cosh(1.0)) < 1e-10);
  CHECK(std::abs(y[1] - std::sinh(1.0)) < 1e-10);
}

TEST_CASE("step limit raises") {
  const Matrix2 m{parse("x"), Expr(), Expr(), parse("-x")};
  OdeOptions opt;
  opt.max_steps = 2;
  CHECK_THROWS_AS(integrate_ode(linear_rhs(m, Var::x, 0.0), Path{0.0, 5.0}, {1.0, 1.0}, opt), OdeError);
}

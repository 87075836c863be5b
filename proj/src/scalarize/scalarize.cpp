#include "fuchs/scalarize.hpp"

#include <algorithm>

#include "fuchs/numeric.hpp"
#include "fuchs/ode.hpp"

namespace fuchs {

namespace {

Expr dx(const Expr& e) { return differentiate(e, Var::x); }
Expr dt(const Expr& e) { return differentiate(e, Var::t); }

}  // namespace

FrobeniusResidual::FrobeniusResidual(const LaxPair& lp) {
  const Matrix2& A = lp.A;
  const Matrix2& B = lp.B;
  Expr r[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Expr comm = A(i, 0) * B(0, j) + A(i, 1) * B(1, j) - (B(i, 0) * A(0, j) + B(i, 1) * A(1, j));
      r[i][j] = dt(A(i, j)) - dx(B(i, j)) + comm;
    }
  }
  residual_ = {r[0][0], r[0][1], r[1][0], r[1][1]};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) entries_.emplace_back(r[i][j]);
  }
}

double FrobeniusResidual::operator()(cplx xv, cplx tv) const {
  const Binding b(xv, tv);
  double m = 0.0;
  for (const Program& p : entries_) m = std::max(m, std::abs(p(b)));
  return m;
}

double frobenius_residual(const LaxPair& lp, cplx xv, cplx tv) { return FrobeniusResidual(lp)(xv, tv); }

ScalarPair scalar_coefficients(const LaxPair& lp, Component c, std::span<const Binding> probes) {
  ScalarPair sp;
  sp.component = c;
  sp.has_source = true;
  if (c == Component::first) {
    sp.diag_a = lp.A.a11;
    sp.off_a = lp.A.a12;
    sp.diag_b = lp.B.a11;
    sp.off_b = lp.B.a12;
  } else {
    sp.diag_a = -lp.A.a11;
    sp.off_a = lp.A.a21;
    sp.diag_b = -lp.B.a11;
    sp.off_b = lp.B.a21;
  }
  const char* which = c == Component::first ? "12" : "21";
  if (numerically_zero(sp.off_a, probes, 1e-10)) {
    throw ScalarizeError(std::string("a") + which + " vanishes identically");
  }
  if (numerically_zero(sp.off_b, probes, 1e-10)) {
    throw ScalarizeError(std::string("b") + which + " vanishes identically");
  }
  const Expr& a11 = sp.diag_a;
  const Expr& a12 = sp.off_a;
  const Expr dlog_a12 = dx(a12) / a12;
  const Expr det = lp.A.a11 * lp.A.a22 - lp.A.a12 * lp.A.a21;
  sp.p1 = -dlog_a12;
  sp.q1 = det - dx(a11) + a11 * dlog_a12;
  sp.p2 = a12 / sp.off_b;
  sp.q2 = a11 - sp.diag_b * a12 / sp.off_b;
  return sp;
}

Expr q2_from_off_diagonals(const ScalarPair& sp) {
  if (!sp.has_source) throw ScalarizeError("scalar pair has no source matrix entries");
  return Expr(0.5) * (dx(sp.off_b) / sp.off_b - dt(sp.off_a) / sp.off_b);
}

Vec2 JointSolution::at(cplx xv, cplx tv) const {
  OdeOptions opt;
  opt.rtol = rtol;
  opt.atol = rtol * 1e-2;
  Vec2 y = phi0;
  if (tv != t0) y = integrate_ode(linear_rhs(lax->B, Var::t, x0), Path{t0, tv}, y, opt).final_value();
  if (xv != x0) y = integrate_ode(linear_rhs(lax->A, Var::x, tv), route(x0, xv, avoid_x), y, opt).final_value();
  return y;
}

ScalarResidual scalar_residual(const ScalarPair& sp, const JointSolution& sol, cplx xv, cplx tv, double h) {
  // Component 2 of Phi for the second-component pair.
  const int k = sp.component == Component::first ? 0 : 1;
  cplx fx[5], ft[5];
  for (int i = 0; i < 5; ++i) {
    fx[i] = sol.at(xv + static_cast<double>(i - 2) * h, tv)[k];
    ft[i] = sol.at(xv, tv + static_cast<double>(i - 2) * h)[k];
  }
  const cplx phi = fx[2];
  const cplx d1 = (fx[0] - 8.0 * fx[1] + 8.0 * fx[3] - fx[4]) / (12.0 * h);
  const cplx d2 = (-fx[0] + 16.0 * fx[1] - 30.0 * fx[2] + 16.0 * fx[3] - fx[4]) / (12.0 * h * h);
  const cplx dtv = (ft[0] - 8.0 * ft[1] + 8.0 * ft[3] - ft[4]) / (12.0 * h);
  const Binding b(xv, tv);
  const double scale = std::max(1.0, std::abs(phi));
  ScalarResidual r;
  r.second_order = std::abs(d2 + evaluate(sp.p1, b) * d1 + evaluate(sp.q1, b) * phi) / scale;
  r.first_order = std::abs(d1 - evaluate(sp.p2, b) * dtv - evaluate(sp.q2, b) * phi) / scale;
  return r;
}

}  // namespace fuchs

#pragma once

#include <span>

#include "fuchs/catalog.hpp"
#include "fuchs/program.hpp"
#include "fuchs/system.hpp"

namespace fuchs {

class ScalarizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// dA/dt - dB/dx + AB - BA with symbolic derivatives, compiled once.
class FrobeniusResidual {
 public:
  explicit FrobeniusResidual(const LaxPair& lp);
  /// Max-entry absolute value at (x, t).
  double operator()(cplx x, cplx t) const;
  const Matrix2& matrix() const { return residual_; }

 private:
  Matrix2 residual_;
  std::vector<Program> entries_;
};

double frobenius_residual(const LaxPair& lp, cplx x, cplx t);

/// The scalar pair of the requested component. The relevant off-diagonal
/// entries must not vanish on the probes (tolerance 1e-10).
ScalarPair scalar_coefficients(const LaxPair& lp, Component c, std::span<const Binding> probes);

/// (1/2)(d/dx log b12 - (1/b12) d/dt a12): the second expression for q2.
Expr q2_from_off_diagonals(const ScalarPair& sp);

/// Fundamental-solution column of the joint system at (x, t), reached from
/// (x0, t0) along t at x0 and then along x. Phi(x0, t0) = phi0.
struct JointSolution {
  const LaxPair* lax;
  cplx x0, t0;
  Vec2 phi0{cplx(1.0, 0.0), cplx(0.5, 0.0)};
  std::vector<cplx> avoid_x{};  ///< singular x points to route around
  double rtol = 1e-13;

  Vec2 at(cplx x, cplx t) const;
};

struct ScalarResidual {
  double second_order = 0.0;  ///< |phi'' + p1 phi' + q1 phi|
  double first_order = 0.0;   ///< |phi' - p2 phi_t - q2 phi|
  double max() const { return std::max(second_order, first_order); }
};

/// Residuals of the two scalar equations on a numeric solution, derivatives
/// by 5-point central differences with step h. Values are divided by
/// max(1, |phi(x,t)|).
ScalarResidual scalar_residual(const ScalarPair& sp, const JointSolution& sol, cplx x, cplx t, double h = 2e-3);

}  // namespace fuchs

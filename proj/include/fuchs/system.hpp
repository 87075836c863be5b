#pragma once

// The linear systems dPhi/dx = A Phi, dPhi/dt = B Phi with traceless 2x2 A, B,
// and the scalar pair obtained from one component of Phi.

#include <array>

#include "fuchs/expr.hpp"

namespace fuchs {

enum class Component { first, second };

inline const char* to_string(Component c) { return c == Component::first ? "first" : "second"; }

struct Matrix2 {
  Expr a11, a12, a21, a22;

  const Expr& operator()(int i, int j) const {
    return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
  }
};

struct LaxPair {
  Matrix2 A;
  Matrix2 B;
};

/// phi'' + p1 phi' + q1 phi = 0 and phi' = p2 dphi/dt + q2 phi.
struct ScalarPair {
  Expr p1, q1, p2, q2;
  Component component = Component::first;
  /// Source entries in first-component orientation: (a12, b12) and (a11, b11),
  /// or (a21, b21) and (-a11, -b11) for the second component. Unset for
  /// pairs supplied directly.
  bool has_source = false;
  Expr off_a, off_b, diag_a, diag_b;
};

using Vec2 = std::array<cplx, 2>;

}  // namespace fuchs

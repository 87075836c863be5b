#pragma once

// Dormand-Prince 5(4) with dense output for linear systems along complex
// contours. The contour is parametrized by a real s: segment i of the path
// covers s in [i, i+1].

#include <functional>
#include <span>
#include <vector>

#include "fuchs/quadrature.hpp"
#include "fuchs/system.hpp"

namespace fuchs {

/// dy/dz at the point z.
using OdeRhs = std::function<Vec2(cplx z, const Vec2& y)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 200000;
  double min_step = 1e-14;  ///< in units of s
};

class OdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DenseTrace {
 public:
  /// Point on the contour at parameter s.
  cplx point(double s) const;
  /// Interpolated solution at parameter s in [0, segments()].
  Vec2 value(double s) const;
  /// Solution at the end of the contour.
  Vec2 final_value() const { return steps_.empty() ? y0_ : steps_.back().y1; }
  std::size_t segments() const { return path_.waypoints.size() - 1; }
  std::size_t steps() const { return steps_.size(); }

 private:
  friend DenseTrace integrate_ode(const OdeRhs&, const Path&, const Vec2&, const OdeOptions&,
                                  std::span<const double>);
  struct Step {
    double s0, h;
    Vec2 y1;
    std::array<Vec2, 5> r;
  };
  Path path_;
  Vec2 y0_{};
  std::vector<Step> steps_;
};

/// dPhi/dz = M Phi with M evaluated along variable v, the other variable fixed.
OdeRhs linear_rhs(const Matrix2& M, Var v, cplx fixed);
/// (phi, phi') for phi'' + p1 phi' + q1 phi = 0 in x at fixed t.
OdeRhs scalar_rhs(const ScalarPair& sp, cplx t);

/// Integrates from the start of the path to its end. Steps land exactly on
/// every waypoint and on every parameter in `land_on` (values in s).
DenseTrace integrate_ode(const OdeRhs& f, const Path& path, const Vec2& y0, const OdeOptions& opt = {},
                         std::span<const double> land_on = {});

/// Classical fixed-step RK4 on a single segment; independent reference.
Vec2 integrate_rk4(const OdeRhs& f, cplx a, cplx b, const Vec2& y0, std::size_t steps);

}  // namespace fuchs

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fuchs/expr.hpp"

namespace fuchs {

/// Piecewise-linear contour through the waypoints, in order.
struct Path {
  std::vector<cplx> waypoints;

  Path() = default;
  Path(std::initializer_list<cplx> pts) : waypoints(pts) {}
  explicit Path(std::vector<cplx> pts) : waypoints(std::move(pts)) {}

  cplx start() const { return waypoints.front(); }
  cplx end() const { return waypoints.back(); }
  double length() const;
  Path reversed() const;
  /// Throws std::invalid_argument for fewer than two waypoints.
  void validate() const;
};

/// Straight segment from a to b, bent around any point of `avoid` closer
/// than `clearance` to the segment.
Path route(cplx a, cplx b, std::span<const cplx> avoid, double clearance = 0.05);

/// f(nodes, out) evaluates the integrand at a batch of points.
using BatchIntegrand = std::function<void(std::span<const cplx>, std::span<cplx>)>;

struct QuadratureResult {
  cplx value;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 4000;
};

/// Adaptive Gauss-Kronrod (7/15) with global bisection of the worst interval.
/// Converged when error <= abs_tol + rel_tol*|value|; otherwise throws
/// ExprError(quadrature_nonconvergence).
QuadratureResult integrate(const BatchIntegrand& f, const Path& path, const QuadratureOptions& opt = {});

/// Integrates e in variable v along the path; the other variable and the
/// parameters come from b.
cplx integrate_along_path(const Expr& e, Var v, const Path& path, const Binding& b);

}  // namespace fuchs

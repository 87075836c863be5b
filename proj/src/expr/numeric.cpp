#include "fuchs/numeric.hpp"

#include <algorithm>

#include "fuchs/program.hpp"

namespace fuchs {

double max_abs(const Expr& e, std::span<const Binding> probes) {
  const Program prog(e);
  double m = 0.0;
  for (const Binding& b : probes) m = std::max(m, std::abs(prog(b)));
  return m;
}

bool numerically_zero(const Expr& e, std::span<const Binding> probes, double tol, const Expr* reference) {
  const double scale = reference ? max_abs(*reference, probes) : 1.0;
  return max_abs(e, probes) <= tol * (1.0 + scale);
}

}  // namespace fuchs

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fuchs/quadrature.hpp"

using namespace fuchs;

namespace {

cplx integral(const char* text, Path p) { return integrate_along_path(parse(text), Var::x, p, {}); }

}  // namespace

TEST_CASE("elementary integrals") {
  CHECK(std::abs(integral("1/x", {1.0, std::numbers::e}) - 1.0) < 1e-13);
  CHECK(std::abs(integral("1/(x - 1)", {2.0, 5.0}) - std::log(4.0)) < 1e-13);
  CHECK(std::abs(integral("2*x", {0.0, 3.0}) - 9.0) < 1e-13);
  CHECK(std::abs(integral("exp(x)", {0.0, cplx(0.0, std::numbers::pi)}) - cplx(-2.0, 0.0)) < 1e-13);
}

TEST_CASE("integrand may depend on t and parameters") {
  Binding b(std::nullopt, 2.0, {{"a", 3.0}});
  const cplx v = integrate_along_path(parse("a*t*x"), Var::x, {0.0, 1.0}, b);
  CHECK(std::abs(v - 3.0) < 1e-13);
  const cplx w = integrate_along_path(parse("x*t"), Var::t, {0.0, 2.0}, Binding(5.0, std::nullopt));
  CHECK(std::abs(w - 10.0) < 1e-13);
}

TEST_CASE("path reversal cancels") {
  const Path p{1.1, cplx(1.8, 0.3), cplx(2.4, -0.2), 1.5};
  for (const char* e : {"1/x", "x^(1/3)*exp(x)", "log(x)/(x + 1)", "sqrt(x*(x - 1))"}) {
    const cplx fwd = integral(e, p);
    const cplx back = integral(e, p.reversed());
    CAPTURE(e);
    CHECK(std::abs(fwd + back) <= 1e-11);
  }
}

TEST_CASE("path independence in a simply connected region") {
  const cplx a = integral("1/x", {1.0, 2.0});
  const cplx b = integral("1/x", {1.0, cplx(1.5, 0.8), cplx(2.5, -0.4), 2.0});
  CHECK(std::abs(a - b) <= 1e-11);
  CHECK(std::abs(a - std::log(2.0)) <= 1e-13);
}

TEST_CASE("difficult integrand still meets the error target") {
  const auto r = integrate(
      [](std::span<const cplx> xs, std::span<cplx> out) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = 1.0 / (xs[i] * xs[i] + 1e-4);
      },
      Path{-1.0, 1.0});
  CHECK(std::abs(r.value - 2.0 / 1e-2 * std::atan(1.0 / 1e-2)) < 1e-9);
  CHECK(r.error <= 1e-12 * (1.0 + std::abs(r.value)));
}

TEST_CASE("singular integrand is reported") {
  bool thrown = false;
  try {
    integral("1/x^2", {-1.0, 1.0});
  } catch (const ExprError& e) {
    thrown = e.kind() == ExprError::Kind::quadrature_nonconvergence ||
             e.kind() == ExprError::Kind::division_by_zero;
  }
  CHECK(thrown);
}

TEST_CASE("route bends around nearby points") {
  const cplx avoid[] = {cplx(1.5, 0.0)};
  const Path p = route(1.0, 2.0, avoid, 0.05);
  REQUIRE(p.waypoints.size() == 4);
  for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
    const cplx a = p.waypoints[i - 1];
    const cplx b = p.waypoints[i];
    for (int k = 0; k <= 100; ++k) CHECK(std::abs(a + (b - a) * (k / 100.0) - avoid[0]) >= 0.05);
  }
  CHECK(route(1.0, 2.0, {}).waypoints.size() == 2);
  CHECK_THROWS_AS(Path{1.0}.validate(), std::invalid_argument);
}

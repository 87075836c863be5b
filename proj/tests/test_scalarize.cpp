#include <doctest.h>

#include "fuchs/catalog.hpp"
#include "fuchs/scalarize.hpp"

using namespace fuchs;

namespace {

using M = std::array<std::array<cplx, 2>, 2>;

M mul(const M& a, const M& b) {
  M r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

// Hand-written dA/dt - dB/dx + [A, B] for PII with z = -t/2, u = 1,
// theta = 1/2 and constant y.
double pii_oracle(cplx y, cplx x, cplx t) {
  const M A{{{x * x, x - y}, {t * x - 2.0 * (0.5 - y * t / 2.0), -x * x}}};
  const M B{{{x / 2.0, 0.5}, {t / 2.0, -x / 2.0}}};
  const M At{{{0.0, 0.0}, {x + y, 0.0}}};
  const M Bx{{{0.5, 0.0}, {0.0, -0.5}}};
  const M ab = mul(A, B), ba = mul(B, A);
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(At[i][j] - Bx[i][j] + ab[i][j] - ba[i][j]));
  return worst;
}

std::vector<Binding> probes_of(const Instance& inst, std::size_t n = 12) {
  Rng rng(3, "scalarize-test/" + inst.entry->id);
  std::vector<Binding> out;
  while (out.size() < n) {
    const cplx x = rng.in(inst.entry->x_box), t = rng.in(inst.entry->t_box);
    if (!inst.near_singular(x, t, 0.05)) out.emplace_back(x, t);
  }
  return out;
}

ScalarPair pair_of(const Instance& inst) {
  return scalar_coefficients(*inst.lax, inst.entry->component, probes_of(inst));
}

}  // namespace

TEST_CASE("Frobenius residual of zero matrices is zero") {
  const Matrix2 zero{Expr(), Expr(), Expr(), Expr()};
  CHECK(frobenius_residual({zero, zero}, 1.3, 0.7) == 0.0);
}

TEST_CASE("Frobenius residual agrees with a hand computation") {
  const Instance good = instantiate("PII.y0");
  const Instance bad = instantiate("negative.PII_bad_y1");
  const cplx x = 1.3, t = 0.7;
  CHECK(std::abs(frobenius_residual(*good.lax, x, t) - pii_oracle(0.0, x, t)) < 1e-13);
  CHECK(pii_oracle(0.0, x, t) < 1e-14);
  CHECK(std::abs(frobenius_residual(*bad.lax, x, t) - pii_oracle(1.0, x, t)) < 1e-12);
  CHECK(frobenius_residual(*bad.lax, x, t) >= 1e-2);

  const FrobeniusResidual compiled(*bad.lax);
  for (const Binding& b : probes_of(bad)) CHECK(std::abs(compiled(*b.x, *b.t) - pii_oracle(1.0, *b.x, *b.t)) < 1e-12);
}

TEST_CASE("Frobenius residual vanishes on every positive Lax pair") {
  for (const auto& id : list_entries()) {
    const Instance inst = instantiate(id);
    if (!inst.lax) continue;
    const FrobeniusResidual res(*inst.lax);
    double worst = 0.0;
    for (const Binding& b : probes_of(inst, 25)) worst = std::max(worst, res(*b.x, *b.t));
    CAPTURE(id);
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("PII.y0 scalar pair") {
  const Instance inst = instantiate("PII.y0");
  const ScalarPair sp = pair_of(inst);
  CHECK(sp.component == Component::first);
  for (const Binding& b : probes_of(inst)) {
    const cplx x = *b.x, t = *b.t;
    CHECK(std::abs(evaluate(sp.p1, b) + 1.0 / x) < 1e-13);
    CHECK(std::abs(evaluate(sp.q1, b) + x * x * (x * x + t)) < 1e-12);
    CHECK(std::abs(evaluate(sp.p2, b) - 2.0 * x) < 1e-13);
    CHECK(std::abs(evaluate(sp.q2, b)) < 1e-13);
  }
}

TEST_CASE("PIV.y_m2t first-order coefficient") {
  const Instance inst = instantiate("PIV.y_m2t");
  const ScalarPair sp = pair_of(inst);
  for (const Binding& b : probes_of(inst)) CHECK(std::abs(evaluate(sp.q2, b) + 1.0 / (2.0 * *b.x)) < 1e-12);
}

TEST_CASE("q2 agrees with the off-diagonal expression") {
  for (const auto& id : list_entries()) {
    const Instance inst = instantiate(id);
    if (!inst.lax) continue;
    const ScalarPair sp = pair_of(inst);
    const Expr alt = q2_from_off_diagonals(sp);
    CAPTURE(id);
    for (const Binding& b : probes_of(inst)) {
      const cplx want = evaluate(sp.q2, b);
      CHECK(std::abs(evaluate(alt, b) - want) <= 1e-9 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("vanishing off-diagonal entry is rejected") {
  const Matrix2 diag{x(), Expr(), Expr(), -x()};
  const std::vector<Binding> probes = {{1.2, 0.8}, {1.7, 1.1}};
  CHECK_THROWS_AS(scalar_coefficients({diag, diag}, Component::first, probes), ScalarizeError);
}

TEST_CASE("scalar equations hold on a numeric solution") {
  const Instance inst = instantiate("PII.y0");
  const ScalarPair sp = pair_of(inst);
  const JointSolution sol{&*inst.lax, inst.entry->basepoint_x, 1.0};
  for (const auto& [x, t] : {std::pair<cplx, cplx>{1.5, 0.5}, {2.0, 0.9}}) {
    const ScalarResidual r = scalar_residual(sp, sol, x, t);
    CHECK(r.second_order <= 1e-7);
    CHECK(r.first_order <= 1e-7);
  }
  // A wrong q2 must show up.
  ScalarPair wrong = sp;
  wrong.q2 = Expr(0.25);
  CHECK(scalar_residual(wrong, sol, 1.5, 0.5).first_order > 1e-3);
}

TEST_CASE("variants share one scalar pair") {
  for (const char* id : {"PIV.y_m2t", "PIV.y_m2t3"}) {
    const Instance a = instantiate(id);
    const Instance b = instantiate(id, {}, 1);
    const ScalarPair sa = pair_of(a), sb = pair_of(b);
    CAPTURE(id);
    for (const Binding& p : probes_of(a)) {
      for (auto m : {&ScalarPair::p1, &ScalarPair::q1, &ScalarPair::p2, &ScalarPair::q2}) {
        const cplx va = evaluate(sa.*m, p);
        CHECK(std::abs(va - evaluate(sb.*m, p)) <= 1e-10 * (1.0 + std::abs(va)));
      }
    }
  }
}

TEST_CASE("second component uses the swapped entries") {
  const Instance inst = instantiate("PII.y_inv_t");
  REQUIRE(inst.entry->component == Component::second);
  const ScalarPair sp = pair_of(inst);
  CHECK(sp.component == Component::second);
  const ScalarPair ref = pair_of(instantiate("PII.y0"));
  for (const Binding& b : probes_of(inst)) {
    for (auto m : {&ScalarPair::p1, &ScalarPair::q1, &ScalarPair::p2}) {
      const cplx v = evaluate(ref.*m, b);
      CHECK(std::abs(evaluate(sp.*m, b) - v) <= 1e-10 * (1.0 + std::abs(v)));
    }
  }
}

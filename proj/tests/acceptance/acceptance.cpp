// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "fuchs/cli.hpp"
#include "fuchs/scalarize.hpp"
#include "fuchs/verify.hpp"

using namespace fuchs;

namespace {

bool report(const char* tag, bool ok, const std::string& detail) {
  std::printf("%s %s  %s\n", tag, ok ? "PASS" : "FAIL", detail.c_str());
  return ok;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Expr random_rational(Rng& rng, int depth) {
  if (depth == 0) {
    const double u = rng.uniform();
    if (u < 0.35) return x();
    if (u < 0.6) return t();
    return Expr(std::round(rng.uniform(-5.0, 5.0) * 4.0) / 4.0 + 0.5);
  }
  const double u = rng.uniform();
  Expr a = random_rational(rng, depth - 1);
  Expr b = random_rational(rng, depth - 1);
  if (u < 0.3) return a + b;
  if (u < 0.5) return a - b;
  if (u < 0.75) return a * b;
  if (u < 0.88) return a / (b * b + Expr(2.0));
  return pow(a, static_cast<std::int64_t>(1 + rng.uniform() * 3));
}

bool ac1() {
  double worst = 0.0;
  std::size_t pairs = 0;
  for (const auto& id : list_entries()) {
    const Instance inst = instantiate(id);
    if (!inst.lax) continue;
    ++pairs;
    const FrobeniusResidual res(*inst.lax);
    const CatalogEntry& e = *inst.entry;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const cplx xv = e.x_box.at(i / 4.0, 0.5), tv = e.t_box.at(j / 4.0, 0.5);
        if (inst.near_singular(xv, tv, 0.05)) continue;
        worst = std::max(worst, res(xv, tv));
      }
    }
  }
  return report("AC1", worst <= 1e-10,
                "max Frobenius residual " + sci(worst) + " over " + std::to_string(pairs) + " Lax pairs, 5x5 grid");
}

bool ac2() {
  double worst = 0.0;
  for (const auto& id : list_entries()) {
    const Instance inst = instantiate(id);
    Rng rng(42, "acceptance-flow/" + id);
    for (int i = 0; i < 16; ++i) worst = std::max(worst, flow_residual(inst, rng.in(inst.entry->t_box)));
  }
  return report("AC2", worst <= 1e-10, "max flow residual " + sci(worst) + " at 16 random t per entry");
}

bool ac3(const std::vector<VerificationReport>& reports) {
  double worst = 0.0;
  bool all = true;
  for (const auto& r : reports) {
    if (!r.expected_decomposition_error) {
      all = false;
      continue;
    }
    worst = std::max(worst, *r.expected_decomposition_error);
  }
  // PII.y_inv_t reduces through the same scalar pair as PII.y0.
  Config cfg;
  const Pipeline a = build_pipeline("PII.y0", cfg);
  const Pipeline b = build_pipeline("PII.y_inv_t", cfg);
  double shared = 0.0;
  for (const Binding& p : b.region.probes) {
    for (auto m : {&ScalarPair::p1, &ScalarPair::q1, &ScalarPair::p2, &ScalarPair::q2}) {
      const cplx va = evaluate(a.sp.*m, p);
      shared = std::max(shared, std::abs(va - evaluate(b.sp.*m, p)) / std::max(1.0, std::abs(va)));
    }
  }
  const bool ok = all && worst <= 1e-9 && shared <= 1e-9;
  return report("AC3", ok,
                "max relative error against the stated f, h, R, M " + sci(worst) + "; PII.y_inv_t vs PII.y0 scalar pair " +
                    sci(shared));
}

bool ac4(const std::vector<VerificationReport>& reports) {
  double worst = 0.0;
  bool all = true;
  for (const auto& r : reports) {
    if (!r.t_independence_max) {
      all = false;
      continue;
    }
    worst = std::max(worst, *r.t_independence_max);
  }
  const VerificationReport neg = full_report("negative.PII_bad_y1");
  const double frob = neg.frobenius_max.value_or(0.0);
  const double dev = neg.t_independence_max.value_or(0.0);
  const bool neg_ok = !neg.passed && (frob >= 1e-3 || dev >= 1e-3);
  return report("AC4", all && worst <= 1e-8 && neg_ok,
                "max deviation " + sci(worst) + " over 32 tau-matched pairs per entry; negative control Frobenius " +
                    sci(frob) + ", deviation " + sci(dev));
}

bool ac5(const std::vector<VerificationReport>& reports) {
  double worst_fit = 0.0, worst_target = 0.0;
  bool all = true;
  std::ostringstream kinds;
  for (const auto& r : reports) {
    if (!r.match || !r.target_error) {
      all = false;
      continue;
    }
    worst_fit = std::max(worst_fit, r.match->residual);
    worst_target = std::max(worst_target, *r.target_error);
    kinds << (kinds.tellp() > 0 ? " " : "") << r.id << "=" << to_string(r.match->target.kind);
  }
  return report("AC5", all && worst_fit <= 1e-8 && worst_target <= 1e-8,
                "max match residual " + sci(worst_fit) + ", max target error " + sci(worst_target) + " [" +
                    kinds.str() + "]");
}

bool ac6() {
  double worst = 0.0;
  std::size_t fewest = SIZE_MAX;
  for (const auto& id : list_entries()) {
    const Pipeline pl = build_pipeline(id);
    const Match m = match_classical(check_t_independence(pl, 32, 42).samples);
    const CrossValidation cv = cross_validate(pl, &m);
    worst = std::max(worst, cv.residual);
    fewest = std::min(fewest, cv.points);
  }
  return report("AC6", worst <= 1e-6 && fewest >= 200,
                "max reduced-equation residual " + sci(worst) + " on traces of at least " + std::to_string(fewest) +
                    " points");
}

bool ac7() {
  // Derivatives against central differences.
  Rng rng(42, "acceptance-derivative");
  const Box xb{{1.1, -0.2}, {2.5, 0.2}};
  const Box tb{{0.5, -0.2}, {1.5, 0.2}};
  const double h = 1e-6;
  double deriv = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Expr e = random_rational(rng, 3);
    const Var v = i % 2 == 0 ? Var::x : Var::t;
    const cplx xv = rng.in(xb), tv = rng.in(tb);
    const cplx dx = v == Var::x ? h : 0.0, dt = v == Var::t ? h : 0.0;
    const cplx fd = (evaluate(e, Binding(xv + dx, tv + dt)) - evaluate(e, Binding(xv - dx, tv - dt))) / (2.0 * h);
    const cplx exact = evaluate(differentiate(e, v), Binding(xv, tv));
    deriv = std::max(deriv, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
  }

  // Quadrature along a path and back.
  const Path p{1.1, cplx(1.8, 0.3), cplx(2.4, -0.2), 1.5};
  double reversal = 0.0;
  for (const char* text : {"1/x", "x^(1/3)*exp(x)", "log(x)/(x + 1)", "sqrt(x*(x - 1))"}) {
    const Expr e = parse(text);
    reversal = std::max(reversal, std::abs(integrate_along_path(e, Var::x, p, {}) +
                                           integrate_along_path(e, Var::x, p.reversed(), {})));
  }

  double first = 0.0, cov = 0.0;
  for (const auto& id : list_entries()) {
    Config cfg;
    const Pipeline pl = build_pipeline(id, cfg);
    first = std::max(first, first_integral_residual(pl, pl.region.probes));
    cov = std::max(cov, basepoint_covariance(pl, pl.region.x_box.at(0.6, 0.3)));
  }

  bool same = true;
  for (const std::vector<std::string>& args : {std::vector<std::string>{"reduce", "PIII.y1", "--seed", "42"},
                                               {"sample", "PIV.y_m2t3", "--out", "-", "--seed", "42"},
                                               {"verify", "--all", "--json", "--out", "", "--seed", "42"}}) {
    std::ostringstream o1, o2, e1, e2;
    const int c1 = cli::run(args, o1, e1);
    const int c2 = cli::run(args, o2, e2);
    same = same && c1 == 0 && c2 == 0 && o1.str() == o2.str() && !o1.str().empty();
  }

  const bool ok = deriv <= 1e-6 && reversal <= 1e-11 && first <= 1e-7 && cov <= 1e-9 && same;
  return report("AC7", ok,
                "derivative " + sci(deriv) + ", path reversal " + sci(reversal) + ", first integral " + sci(first) +
                    ", basepoint covariance " + sci(cov) + ", CLI output " + (same ? "identical" : "differs"));
}

}  // namespace

int main() {
  std::vector<VerificationReport> reports;
  for (const auto& id : list_entries()) reports.push_back(full_report(id));

  bool ok = true;
  ok &= ac1();
  ok &= ac2();
  ok &= ac3(reports);
  ok &= ac4(reports);
  ok &= ac5(reports);
  ok &= ac6();
  ok &= ac7();
  return ok ? 0 : 1;
}

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fuchs/verify.hpp"

using namespace fuchs;

namespace {

std::vector<Sample> synthetic(const std::function<cplx(cplx)>& P, const std::function<cplx(cplx)>& Q) {
  std::vector<Sample> out;
  for (int i = 0; i < 24; ++i) {
    const cplx tau(1.0 + 0.2 * i, 0.1 * std::sin(i));
    out.push_back({0.0, 0.0, tau, P(tau), Q(tau)});
  }
  return out;
}

cplx param(const Match& m, const char* name) { return m.target.params.at(name); }

}  // namespace

TEST_CASE("PII coefficients agree at equal tau") {
  const Pipeline pl = build_pipeline("PII.y0");
  // x^2 + t = 5 at both points.
  const Sample a = sample_at(pl, 1.0, 4.0);
  const Sample b = sample_at(pl, 2.0, 1.0);
  CHECK(std::abs(a.tau - b.tau) < 1e-12);
  CHECK(std::abs(a.Q + 1.25) < 1e-10);
  CHECK(std::abs(b.Q + 1.25) < 1e-10);
  CHECK(deviation(a, b) <= 1e-9);
  CHECK(deviation(a, a) == kDeviationFloor);
}

TEST_CASE("PIV.y_m2t pairs have P = 0, Q = -1") {
  const Pipeline pl = build_pipeline("PIV.y_m2t");
  const Independence ind = check_t_independence(pl, 32, 42);
  CHECK(ind.samples.size() == 64);
  CHECK(ind.max_deviation <= 1e-8);
  for (const Sample& s : ind.samples) {
    CHECK(std::abs(s.P) <= 1e-10);
    CHECK(std::abs(s.Q + 1.0) <= 1e-10);
  }
}

TEST_CASE("t-independence holds for every entry") {
  for (const auto& id : list_entries()) {
    const Pipeline pl = build_pipeline(id);
    const Independence ind = check_t_independence(pl, 32, 42);
    CAPTURE(id);
    CHECK(ind.samples.size() == 64);
    CHECK(ind.max_deviation <= 1e-8);
    for (std::size_t i = 0; i < ind.samples.size(); i += 2) {
      const Sample& a = ind.samples[i];
      const Sample& b = ind.samples[i + 1];
      CHECK(std::abs(a.x - b.x) >= 0.1);
      CHECK(std::abs(a.tau - b.tau) <= 1e-9 * (1.0 + std::abs(a.tau)));
    }
  }
}

TEST_CASE("negative control is rejected") {
  const VerificationReport r = full_report("negative.PII_bad_y1");
  CHECK_FALSE(r.passed);
  REQUIRE(r.frobenius_max.has_value());
  CHECK(*r.frobenius_max >= 1e-2);
  if (r.t_independence_max) CHECK(*r.t_independence_max >= 1e-3);
}

TEST_CASE("match_classical on synthetic coefficients") {
  const auto zero = [](cplx) { return cplx(0.0); };
  const Match airy = match_classical(synthetic(zero, [](cplx tau) { return -tau / 4.0; }));
  CHECK(airy.target.kind == TargetKind::airy);
  CHECK(std::abs(param(airy, "scale") - std::cbrt(4.0)) < 1e-10);

  const Match cst = match_classical(synthetic(zero, [](cplx) { return cplx(-0.25); }));
  CHECK(cst.target.kind == TargetKind::constant);
  CHECK(std::abs(param(cst, "c") - 0.25) < 1e-12);

  // Whittaker: w'' - (1/4 - kappa/tau + (4 mu2 - 1)/(4 tau^2)) w = 0.
  const double kappa = 0.75, mu2 = 1.0 / 16.0;
  const Match wh = match_classical(
      synthetic(zero, [&](cplx tau) { return -(0.25 - kappa / tau + (4.0 * mu2 - 1.0) / (4.0 * tau * tau)); }));
  CHECK(wh.target.kind == TargetKind::whittaker);
  CHECK(std::abs(param(wh, "kappa") - kappa) < 1e-10);
  CHECK(std::abs(param(wh, "mu2") - mu2) < 1e-10);
  CHECK(wh.residual <= 1e-12);

  // A first-derivative term A/tau is removed before fitting: w = tau^(-A/2) v.
  const double A = 1.5;
  auto P = [&](cplx tau) { return A / tau; };
  auto Q = [&](cplx tau) {
    const cplx qv = -(0.25 - kappa / tau + (4.0 * mu2 - 1.0) / (4.0 * tau * tau));
    return qv + P(tau) * P(tau) / 4.0 - A / (2.0 * tau * tau);
  };
  const Match shifted = match_classical(synthetic(P, Q));
  CHECK(shifted.target.kind == TargetKind::whittaker);
  CHECK(std::abs(shifted.p1 - A) < 1e-10);
  CHECK(std::abs(param(shifted, "kappa") - kappa) < 1e-9);
  CHECK(std::abs(param(shifted, "mu2") - mu2) < 1e-9);

  std::vector<Sample> few = synthetic(zero, zero);
  few.resize(5);
  CHECK_THROWS_AS(match_classical(few), VerifyError);
}

TEST_CASE("target_error") {
  ClassicalTarget a{TargetKind::constant, {{"c", 1.0}}};
  ClassicalTarget b{TargetKind::constant, {{"c", 1.0 + 1e-9}}};
  CHECK(target_error(a, b) < 2e-9);
  b.kind = TargetKind::airy;
  CHECK(std::isinf(target_error(a, b)));
}

TEST_CASE("classical targets of the catalog") {
  const Match pii = match_classical(check_t_independence(build_pipeline("PII.y0"), 32, 42).samples);
  CHECK(pii.target.kind == TargetKind::airy);
  CHECK(std::abs(param(pii, "scale") - std::cbrt(4.0)) < 1e-8);

  Config cfg;
  cfg.params = {{"theta_inf", Rational(5, 2)}};
  const Match piii = match_classical(check_t_independence(build_pipeline("PIII.y1", cfg), 32, 42).samples);
  CHECK(piii.target.kind == TargetKind::whittaker);
  CHECK(std::abs(param(piii, "kappa") - 0.75) < 1e-8);
  CHECK(std::abs(param(piii, "mu2") - 0.0625) < 1e-8);

  const Match kit = match_classical(check_t_independence(build_pipeline("PVdeg.kitaev_sqrt"), 32, 42).samples);
  CHECK(kit.target.kind == TargetKind::constant);
  CHECK(std::abs(param(kit, "c") - 1.0) < 1e-8);
}

TEST_CASE("full reports pass for every positive entry") {
  for (const auto& id : list_entries()) {
    const VerificationReport r = full_report(id);
    CAPTURE(id);
    for (const auto& e : r.errors) MESSAGE(e);
    CHECK(r.passed);
    REQUIRE(r.match.has_value());
    CHECK(r.match->residual <= 1e-8);
    REQUIRE(r.cross_validation_residual.has_value());
    CHECK(*r.cross_validation_residual <= 1e-6);
  }
  const VerificationReport pii = full_report("PII.y0");
  CHECK(pii.match->target.kind == TargetKind::airy);
  const VerificationReport pv = full_report("PV.y_lin");
  CHECK(pv.match->target.kind == TargetKind::whittaker);
  CHECK(std::abs(pv.match->target.params.at("kappa") + 1.0) < 1e-8);
  CHECK(std::abs(pv.match->target.params.at("mu2") - 2.25) < 1e-8);
}

TEST_CASE("looser tolerances never turn a pass into a failure") {
  Config loose;
  Tolerances& t = loose.tol;
  for (double* v : {&t.frobenius, &t.flow, &t.decomposition, &t.scalar, &t.first_integral, &t.independence, &t.match,
                    &t.crossval})
    *v *= 10.0;
  for (const auto& id : list_entries()) {
    CAPTURE(id);
    CHECK(full_report(id, loose).passed);
  }
  Config tight;
  tight.tol.independence = 1e-15;
  CHECK_FALSE(full_report("PII.y0", tight).passed);
}

TEST_CASE("classical target does not depend on the basepoint") {
  for (const char* id : {"PII.y0", "PIV.y_m2t3", "PV.y_lin"}) {
    const VerificationReport a = full_report(id);
    Config cfg;
    cfg.region.basepoint_x = lookup(id).x_box.at(0.5, 0.5);
    const VerificationReport b = full_report(id, cfg);
    CAPTURE(id);
    CHECK(b.passed);
    REQUIRE(a.match.has_value());
    REQUIRE(b.match.has_value());
    CHECK(target_error(b.match->target, a.match->target) <= 1e-8);
  }
}

TEST_CASE("PIV.y_m2t solution is a combination of exp(+-tau)") {
  const Pipeline pl = build_pipeline("PIV.y_m2t");
  const cplx t = 1.0;
  const cplx x0 = pl.red->basepoint_x();
  const DenseTrace tr = solve_linear_system(pl, t, Path{x0, cplx(2.5, 0.0)}, {1.0, 0.5}, {1e-13, 1e-15});
  const int idx = pl.dec.component == Component::first ? 0 : 1;
  const int n = 200;
  Eigen::MatrixXcd A(n, 2);
  Eigen::VectorXcd w(n);
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) / n;
    const cplx x = tr.point(s);
    const cplx tau = pl.tau(x, t);
    w(i) = tr.value(s)[idx] / pl.red->gauge_at(x);
    A(i, 0) = std::exp(tau);
    A(i, 1) = std::exp(-tau);
  }
  const Eigen::VectorXcd ab = A.colPivHouseholderQr().solve(w);
  const double miss = (A * ab - w).cwiseAbs().maxCoeff() / w.cwiseAbs().maxCoeff();
  CHECK(miss <= 1e-6);
}

TEST_CASE("cross-validation on dense traces") {
  for (const auto& id : list_entries()) {
    const Pipeline pl = build_pipeline(id);
    const CrossValidation cv = cross_validate(pl, nullptr);
    CAPTURE(id);
    CHECK(cv.points >= 200);
    CHECK(cv.residual <= 1e-6);
  }
  CHECK_THROWS_AS(cross_validate(build_pipeline("PII.y0"), nullptr, 1.0, 1.6, 2.5, 3), VerifyError);
}

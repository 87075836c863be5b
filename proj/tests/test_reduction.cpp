#include <doctest.h>

#include <functional>

#include "fuchs/verify.hpp"

using namespace fuchs;

namespace {

using Fn = std::function<cplx(cplx x, cplx t)>;

struct Want {
  const char* id;
  Fn f, h, R, M;
};

// Hand-written decompositions at the default parameters.
const std::vector<Want>& wanted() {
  static const std::vector<Want> w = {
      {"PII.y0", [](cplx x, cplx) { return 2.0 * x; }, [](cplx, cplx) { return cplx(0.0); },
       [](cplx, cplx) { return cplx(0.0); }, [](cplx, cplx) { return cplx(0.0); }},
      {"PIII.y1", [](cplx, cplx) { return cplx(0.0); }, [](cplx x, cplx) { return (x + 1.0) / (x * (x - 1.0)); },
       [](cplx x, cplx) { return 0.75 / x - 2.0 / (x - 1.0); }, [](cplx, cplx) { return cplx(-1.0); }},
      {"PIV.y_m2t", [](cplx, cplx) { return cplx(1.0); }, [](cplx x, cplx) { return 1.0 / x; },
       [](cplx x, cplx) { return -0.5 / x; }, [](cplx, cplx) { return cplx(0.0); }},
      {"PIV.y_m2t3", [](cplx, cplx) { return cplx(1.0); }, [](cplx x, cplx) { return 1.0 / (3.0 * x); },
       [](cplx x, cplx) { return -1.0 / (6.0 * x); }, [](cplx, cplx t) { return 2.0 * t / 3.0; }},
      {"PV.y_lin", [](cplx, cplx) { return cplx(0.0); }, [](cplx x, cplx) { return 1.0 / (x - 1.0); },
       [](cplx x, cplx) { return 0.5 / (x - 1.0); }, [](cplx, cplx) { return cplx(-0.5); }},
      {"PV.y_m1", [](cplx x, cplx) { return 0.5 / (x * (x - 1.0)); },
       [](cplx x, cplx) { return 0.5 * (1.0 / x + 1.0 / (x - 1.0)); },
       [](cplx x, cplx) { return -0.25 / x - 0.25 / (x - 1.0); }, [](cplx, cplx) { return cplx(-0.25); }},
      {"PVdeg.kitaev_sqrt", [](cplx x, cplx) { return 0.5 / (x * (x - 1.0)); },
       [](cplx x, cplx) { return 0.5 / (x - 1.0); }, [](cplx x, cplx) { return -0.25 / (x - 1.0); },
       [](cplx, cplx t) { return 0.5 / t; }},
  };
  return w;
}

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST_CASE("decompositions reproduce the hand-written forms") {
  for (const Want& w : wanted()) {
    const Pipeline pl = build_pipeline(w.id);
    CAPTURE(w.id);
    CHECK(pl.dec.residual <= 1e-9);
    double worst = 0.0;
    for (const Binding& b : pl.region.probes) {
      const cplx x = *b.x, t = *b.t;
      worst = std::max({worst, rel(evaluate(pl.dec.f, b), w.f(x, t)), rel(evaluate(pl.dec.h, b), w.h(x, t)),
                        rel(evaluate(pl.dec.R, b), w.R(x, t)), rel(evaluate(pl.dec.M, b), w.M(x, t))});
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("second-component PII shares f and h with the first") {
  const Pipeline a = build_pipeline("PII.y0");
  const Pipeline b = build_pipeline("PII.y_inv_t");
  CHECK(b.dec.component == Component::second);
  for (const Binding& p : b.region.probes) {
    CHECK(rel(evaluate(b.dec.f, p), evaluate(a.dec.f, p)) <= 1e-9);
    CHECK(std::abs(evaluate(b.dec.h, p)) <= 1e-9);
  }
}

TEST_CASE("case tags and exponents") {
  const Pipeline pii = build_pipeline("PII.y0");
  CHECK(classify_case(pii.dec) == CaseTag::EQ3);
  REQUIRE(pii.dec.exponent_A.has_value());
  CHECK(std::abs(*pii.dec.exponent_A) <= 1e-9);

  Config cfg;
  cfg.params = {{"theta_inf", Rational(5, 2)}};
  const Pipeline piii = build_pipeline("PIII.y1", cfg);
  CHECK(classify_case(piii.dec) == CaseTag::EQ2);
  REQUIRE(piii.dec.exponent_A.has_value());
  CHECK(std::abs(*piii.dec.exponent_A - 1.5) <= 1e-9);

  CHECK(classify_case(build_pipeline("PIV.y_m2t").dec) == CaseTag::mixed);
  CHECK(classify_case(build_pipeline("PV.y_lin").dec) == CaseTag::EQ2);
  CHECK(std::string(to_string(CaseTag::generic_EQ)) == "generic_EQ");
}

TEST_CASE("classify_case on flags") {
  Decomposition d;
  d.f_zero = d.h_zero = true;
  CHECK(classify_case(d) == CaseTag::EQ1);
  d.h_zero = false;
  CHECK(classify_case(d) == CaseTag::EQ2);
  d.f_zero = false;
  d.h_zero = true;
  d.M_zero = true;
  CHECK(classify_case(d) == CaseTag::EQ3);
  d.M_zero = false;
  d.M_constant = true;
  CHECK(classify_case(d) == CaseTag::EQ1);
  d.M_constant = false;
  CHECK(classify_case(d) == CaseTag::generic_EQ);
  d.h_zero = false;
  d.M_zero = true;
  CHECK(classify_case(d) == CaseTag::mixed);
}

TEST_CASE("tau_map") {
  const Pipeline pii = build_pipeline("PII.y0");
  // x^2 + t - 1 for basepoint 1.
  CHECK(std::abs(tau_map(pii.dec, 2.0, 1.0, 1.0) - 4.0) < 1e-12);
  CHECK(std::abs(tau_map(pii.dec, cplx(1.7, 0.2), 0.8, 1.0) - (cplx(1.7, 0.2) * cplx(1.7, 0.2) + 0.8 - 1.0)) <
        1e-12);

  Config cfg;
  cfg.params = {{"theta_inf", Rational(5, 2)}};
  const Pipeline piii = build_pipeline("PIII.y1", cfg);
  CHECK(std::abs(tau_map(piii.dec, 2.0, 3.0, 2.0) - 3.0) < 1e-12);
  REQUIRE(piii.red->frame().calibrated);
  // (x - 1)^2 t / x.
  CHECK(std::abs(piii.red->tau_framed(2.0, 3.0) - 1.5) < 1e-10);
  CHECK(std::abs(piii.red->tau_framed(3.0, 1.2) - 4.0 * 1.2 / 3.0) < 1e-10);
}

TEST_CASE("empty integrals leave tau = t") {
  Decomposition d;
  d.f = Expr();
  d.h = Expr();
  d.R = Expr();
  for (cplx x : {cplx(1.5), cplx(2.2, 0.3)}) {
    CHECK(tau_map(d, x, 0.9, 1.0) == cplx(0.9));
    CHECK(gauge(d, x, 1.0) == cplx(1.0));
  }
}

TEST_CASE("gauge") {
  const Pipeline pii = build_pipeline("PII.y0");
  CHECK(std::abs(gauge(pii.dec, 2.3, 1.0) - 1.0) < 1e-14);

  const Pipeline piv = build_pipeline("PIV.y_m2t");
  CHECK(std::abs(gauge(piv.dec, 4.0, 1.0) - 0.5) < 1e-12);

  Config cfg;
  cfg.params = {{"theta_inf", Rational(5, 2)}};
  const Pipeline piii = build_pipeline("PIII.y1", cfg);
  auto closed = [](double x) { return std::pow(x, 0.75) * std::pow(x - 1.0, -2.0); };
  CHECK(std::abs(gauge(piii.dec, 4.0, 2.0) - closed(4.0) / closed(2.0)) < 1e-12);
  CHECK(std::abs(piii.red->gauge_at(4.0) - closed(4.0) / closed(piii.red->basepoint_x().real())) < 1e-12);
}

TEST_CASE("reduced coefficients") {
  const Pipeline pii = build_pipeline("PII.y0");
  for (const Binding& b : pii.region.probes) {
    const cplx x = *b.x, t = *b.t;
    const Coefficients c = reduced_coefficients(*pii.red, x, t);
    CHECK(std::abs(c.P) < 1e-10);
    CHECK(std::abs(c.Q + (x * x + t) / 4.0) < 1e-10);
  }
  for (const char* id : {"PIV.y_m2t", "PV.y_m1"}) {
    const Pipeline pl = build_pipeline(id);
    const double q = std::string(id) == "PV.y_m1" ? -0.25 : -1.0;
    REQUIRE(pl.red->frame().calibrated);
    CAPTURE(id);
    for (const Binding& b : pl.region.probes) {
      const Coefficients c = pl.red->framed_coefficients_at(*b.x, *b.t);
      CHECK(std::abs(c.P) < 1e-10);
      CHECK(std::abs(c.Q - q) < 1e-10);
    }
  }
}

TEST_CASE("flat pair reduces to w'' = 0") {
  // phi'' = 0 and phi' = phi_t: f = 1, tau = t + x - x0.
  ScalarPair sp;
  sp.p2 = Expr(1.0);
  ProbeRegion region{1.0, {{1.1, -0.2}, {2.5, 0.2}}, {{0.5, -0.2}, {1.5, 0.2}}, {}, {}};
  Rng rng(1, "flat");
  for (int i = 0; i < 12; ++i) region.probes.emplace_back(rng.in(region.x_box), rng.in(region.t_box));
  const Decomposition dec = decompose(sp, region);
  CHECK(classify_case(dec) == CaseTag::EQ3);
  const ReducedEquation red(sp, dec, 1.0, {});
  const Coefficients c = red.coefficients_at(1.7, 0.8);
  CHECK(std::abs(c.P) < 1e-14);
  CHECK(std::abs(c.Q) < 1e-14);
  CHECK(std::abs(red.tau_at(1.7, 0.8) - 1.5) < 1e-12);
}

TEST_CASE("first-integral property") {
  for (const auto& id : list_entries()) {
    const Pipeline pl = build_pipeline(id);
    CAPTURE(id);
    CHECK(first_integral_residual(pl, pl.region.probes) <= 1e-7);
  }
}

TEST_CASE("basepoint covariance") {
  for (const auto& id : list_entries()) {
    const Pipeline pl = build_pipeline(id);
    const cplx other = pl.region.x_box.at(0.6, 0.3);
    CAPTURE(id);
    CHECK(basepoint_covariance(pl, other) <= 1e-9);
  }
}

TEST_CASE("probe region respects the singular set") {
  for (const auto& id : list_entries()) {
    const Instance inst = instantiate(id);
    const ProbeRegion r = probe_region(inst, 42, 16);
    CAPTURE(id);
    CHECK(r.probes.size() == 16);
    for (const Binding& b : r.probes) CHECK_FALSE(inst.near_singular(*b.x, *b.t, 0.05));
    const ProbeRegion again = probe_region(inst, 42, 16);
    CHECK(again.probes.front().x == r.probes.front().x);
  }
}

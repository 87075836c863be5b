#include "fuchs/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "fuchs/quadrature.hpp"

namespace fuchs {

const char* to_string(CaseTag c) {
  switch (c) {
    case CaseTag::generic_EQ: return "generic_EQ";
    case CaseTag::EQ1: return "EQ1";
    case CaseTag::EQ2: return "EQ2";
    case CaseTag::EQ3: return "EQ3";
    case CaseTag::mixed: return "mixed";
  }
  return "?";
}

ProbeRegion probe_region(const Instance& inst, std::uint64_t seed, std::size_t count,
                         const RegionOverrides& overrides) {
  const CatalogEntry& entry = *inst.entry;
  ProbeRegion r;
  r.basepoint_x = overrides.basepoint_x.value_or(entry.basepoint_x);
  r.x_box = overrides.x_box.value_or(entry.x_box);
  r.t_box = overrides.t_box.value_or(entry.t_box);
  for (const Expr& s : inst.singular_x) {
    if (!depends_on(s, Var::t)) r.avoid_x.push_back(evaluate(s, {}));
  }
  Rng rng(seed, "probes/" + entry.id);
  std::size_t attempts = 0;
  while (r.probes.size() < count) {
    if (++attempts > 100000) throw ReductionError("probe boxes of " + entry.id + " are covered by singular points");
    const cplx xv = rng.in(r.x_box);
    const cplx tv = rng.in(r.t_box);
    if (inst.near_singular(xv, tv, 0.05)) continue;
    r.probes.emplace_back(xv, tv);
  }
  return r;
}

namespace {

Expr dx(const Expr& e) { return differentiate(e, Var::x); }
Expr dt(const Expr& e) { return differentiate(e, Var::t); }
Expr at_t(const Expr& e, cplx tv) { return substitute(e, Var::t, tv); }
Expr at_x(const Expr& e, cplx xv) { return substitute(e, Var::x, xv); }

cplx eval_at(const Expr& e, cplx xv, cplx tv) { return evaluate(e, Binding(xv, tv)); }

/// max |diff| / (1 + max |ref|) over the probes.
double relative(const Expr& diff, const Expr& ref, std::span<const Binding> probes) {
  return max_abs(diff, probes) / (1.0 + max_abs(ref, probes));
}

std::vector<Binding> with_t(std::span<const Binding> probes, cplx tv) {
  std::vector<Binding> out;
  out.reserve(probes.size());
  for (const Binding& b : probes) out.emplace_back(b.x, tv);
  return out;
}

bool nearly(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); }

constexpr double kZeroTol = 1e-10;
constexpr double kFitTol = 1e-8;

}  // namespace

Decomposition decompose(const ScalarPair& sp, const ProbeRegion& region) {
  const std::span<const Binding> probes = region.probes;
  const Box& tb = region.t_box;
  const Box& xb = region.x_box;
  const cplx t0 = tb.at(0.2, 0.5), t1 = tb.at(0.8, 0.5), t2 = tb.at(0.5, 0.8), tr = tb.at(0.5, 0.5);
  const cplx x1 = xb.at(0.25, 0.5), x2 = xb.at(0.75, 0.5);

  Decomposition d;
  d.component = sp.component;
  d.direct = !sp.has_source;
  const double sign = sp.component == Component::first ? 1.0 : -1.0;
  double residual = 0.0;

  if (sp.has_source) {
    const Expr& a12 = sp.off_a;
    const Expr& b12 = sp.off_b;
    d.g_of_t = at_x(b12, region.basepoint_x);
    const cplx g0 = evaluate(d.g_of_t, Binding(std::nullopt, t0));
    const cplx g1 = evaluate(d.g_of_t, Binding(std::nullopt, t1));
    const cplx gr = evaluate(d.g_of_t, Binding(std::nullopt, tr));
    if (g0 == 0.0 || g1 == 0.0 || gr == 0.0) throw ReductionError("g(t) = b12(x0, t) vanishes at a reference t");
    d.P3 = at_t(b12, tr) / Expr(gr);
    const Expr s0 = at_t(a12, t0) / Expr(g0);
    const Expr s1 = at_t(a12, t1) / Expr(g1);
    d.P2 = (s1 - s0) / Expr(t1 - t0);
    d.P1 = s0 - Expr(t0) * d.P2;
    d.f = d.P1 / d.P3;
    d.h = d.P2 / d.P3;

    const Expr a12_fit = d.g_of_t * (d.P1 + t() * d.P2);
    const double ra = std::max(relative(a12 - a12_fit, a12, probes),
                               relative(a12 - a12_fit, a12, with_t(probes, t2)));
    const double rb = relative(b12 - d.g_of_t * d.P3, b12, probes);
    if (ra > kFitTol) throw ReductionError("a12/g is not affine in t (residual " + format_double(ra) + ")");
    if (rb > kFitTol) throw ReductionError("b12/g depends on t (residual " + format_double(rb) + ")");
    residual = std::max({residual, ra, rb});
  } else {
    d.g_of_t = Expr(1.0);
    d.P3 = Expr(1.0);
    d.h = (at_t(sp.p2, t1) - at_t(sp.p2, t0)) / Expr(t1 - t0);
    d.f = at_t(sp.p2, t0) - Expr(t0) * d.h;
    d.P1 = d.f;
    d.P2 = d.h;
    const double rp = std::max(relative(sp.p2 - (d.f + t() * d.h), sp.p2, probes),
                               relative(sp.p2 - (d.f + t() * d.h), sp.p2, with_t(probes, t2)));
    if (rp > kFitTol) throw ReductionError("p2 is not affine in t (residual " + format_double(rp) + ")");
    residual = std::max(residual, rp);
  }

  const Expr p2 = d.f + t() * d.h;
  d.f_zero = numerically_zero(d.f, probes, kZeroTol, &p2);
  d.h_zero = numerically_zero(d.h, probes, kZeroTol, &p2);

  // Split q2 = R + M p2 in the orientation of the scalar pair, then flip
  // the sign for the second component.
  const Expr& q2 = sp.q2;
  const bool q2_static = numerically_zero(dt(q2), probes, kZeroTol, &q2);
  Expr R, M;
  if (d.f_zero && d.h_zero) {
    if (!q2_static) throw ReductionError("f and h vanish but q2 depends on t");
    R = at_t(q2, tr);
    M = Expr(0.0);
  } else if (d.f_zero) {
    const cplx hx1 = eval_at(d.h, x1, tr);
    const cplx m = (eval_at(q2, x1, t1) - eval_at(q2, x1, t0)) / ((t1 - t0) * hx1);
    M = Expr(m);
    R = at_t(q2, tr) - Expr(m * tr) * d.h;
  } else if (d.h_zero) {
    R = at_t(q2, tr);
    if (q2_static) {
      M = Expr(0.0);
    } else {
      M = (at_x(q2, x1) - Expr(eval_at(q2, x1, tr))) / Expr(eval_at(d.f, x1, tr));
    }
  } else {
    const cplx ta = t1;
    const cplx u11 = eval_at(p2, x1, ta), u12 = -eval_at(p2, x1, tr);
    const cplx u21 = eval_at(p2, x2, ta), u22 = -eval_at(p2, x2, tr);
    const cplx r1 = eval_at(q2, x1, ta) - eval_at(q2, x1, tr);
    const cplx r2 = eval_at(q2, x2, ta) - eval_at(q2, x2, tr);
    const cplx det = u11 * u22 - u12 * u21;
    if (std::abs(det) <= 1e-12 * (std::abs(u11 * u22) + std::abs(u12 * u21))) {
      throw ReductionError("R/M split is singular at the reference points");
    }
    const cplx m_r = (u11 * r2 - u21 * r1) / det;
    R = at_t(q2, tr) - Expr(m_r) * at_t(p2, tr);
    M = (at_x(q2, x1) - Expr(eval_at(q2, x1, tr)) + Expr(m_r * eval_at(p2, x1, tr))) / at_x(p2, x1);
  }
  d.R = sign > 0 ? R : -R;
  d.M = sign > 0 ? M : -M;

  const Expr q2_signed = sign > 0 ? q2 : -q2;
  const Expr split = q2_signed - (d.R + d.M * p2);
  const double rq = std::max(relative(split, q2, probes), relative(split, q2, with_t(probes, t2)));
  if (rq > kFitTol) throw ReductionError("inconsistent R/M split (residual " + format_double(rq) + ")");
  residual = std::max(residual, rq);
  d.residual = residual;

  d.M_zero = numerically_zero(d.M, probes, kZeroTol, &q2);
  d.M_constant = d.M_zero || numerically_zero(dt(d.M), probes, kZeroTol, &d.M);

  const CaseTag tag = classify_case(d);
  if (sp.has_source) {
    const Expr dlog_g = dt(d.g_of_t) / d.g_of_t;
    if (tag == CaseTag::generic_EQ) {
      d.M_vs_g = max_abs(d.M + Expr(0.5) * dlog_g, probes);
    }
    std::optional<Expr> A;
    if (tag == CaseTag::EQ2) A = t() * (dlog_g + Expr(2.0) * d.M);
    if (tag == CaseTag::EQ3 || tag == CaseTag::mixed) A = dlog_g + Expr(2.0) * d.M;
    if (A) {
      const cplx A0 = evaluate(*A, Binding(std::nullopt, t0));
      const cplx A1 = evaluate(*A, Binding(std::nullopt, t1));
      if (nearly(A0, A1, kFitTol)) d.exponent_A = A0;
    }
  }
  return d;
}

CaseTag classify_case(const Decomposition& d) {
  if (d.f_zero && d.h_zero) return CaseTag::EQ1;
  if (d.f_zero) return CaseTag::EQ2;
  if (d.h_zero) {
    if (d.M_zero) return CaseTag::EQ3;
    return d.M_constant ? CaseTag::EQ1 : CaseTag::generic_EQ;
  }
  return d.M_zero ? CaseTag::mixed : CaseTag::generic_EQ;
}

namespace {

BatchIntegrand batch(const Program& p) {
  return [&p](std::span<const cplx> nodes, std::span<cplx> out) { p.eval(nodes, {}, {}, out); };
}

cplx exp_integral(const Program& p, const Path& path) { return std::exp(integrate(batch(p), path).value); }

}  // namespace

ReducedEquation::ReducedEquation(const ScalarPair& sp, const Decomposition& dec, cplx basepoint_x,
                                 std::vector<cplx> avoid_x)
    : dec_(dec),
      case_(classify_case(dec)),
      x0_(basepoint_x),
      avoid_(std::move(avoid_x)),
      f_(dec.f),
      h_(dec.h),
      df_(dx(dec.f)),
      dh_(dx(dec.h)),
      p1_(sp.p1),
      q1_(sp.q1),
      R_(dec.R_eff()),
      dR_(dx(dec.R_eff())) {}

Path ReducedEquation::path_to(cplx xv) const { return route(x0_, xv, avoid_); }

cplx ReducedEquation::E(cplx xv) const {
  if (dec_.h_zero || xv == x0_) return 1.0;
  return exp_integral(h_, path_to(xv));
}

cplx ReducedEquation::S(cplx xv) const {
  if (dec_.f_zero || xv == x0_) return 0.0;
  const BatchIntegrand fe = [this](std::span<const cplx> nodes, std::span<cplx> out) {
    f_.eval(nodes, {}, {}, out);
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] *= E(nodes[i]);
  };
  return integrate(fe, path_to(xv)).value;
}

cplx ReducedEquation::gauge_at(cplx xv) const {
  if (xv == x0_) return 1.0;
  return exp_integral(R_, path_to(xv));
}

std::pair<cplx, cplx> ReducedEquation::tau_derivatives(cplx xv, cplx tv, cplx Ex) const {
  const Binding b(xv, tv);
  const cplx hv = h_(b);
  const cplx u = tv * hv + f_(b);
  return {u * Ex, (tv * dh_(b) + df_(b) + u * hv) * Ex};
}

Coefficients ReducedEquation::coefficients_at(cplx xv, cplx tv) const { return coefficients_at(xv, tv, E(xv)); }

Coefficients ReducedEquation::coefficients_at(cplx xv, cplx tv, cplx Ex) const {
  const Binding b(xv, tv);
  const cplx hv = h_(b);
  const cplx fv = f_(b);
  const cplx u = tv * hv + fv;
  if (std::abs(u) <= 1e-14 * (1.0 + std::abs(tv * hv) + std::abs(fv))) {
    throw ReductionError("d tau/dx vanishes at x = " + format_double(xv.real()) + "," + format_double(xv.imag()));
  }
  const cplx p1 = p1_(b);
  const cplx Rv = R_(b);
  const cplx Pn = (tv * dh_(b) + df_(b) + u * (hv + p1 + 2.0 * Rv)) / (u * u);
  const cplx Qn = (dR_(b) + Rv * Rv + p1 * Rv + q1_(b)) / (u * u);
  return {Pn / Ex, Qn / (Ex * Ex)};
}

void ReducedEquation::calibrate(const Expr& tau_closed, const Box& xb, const Box& tb) {
  const cplx fit_x[2] = {xb.at(0.3, 0.5), xb.at(0.7, 0.5)};
  const cplx fit_t[2] = {tb.at(0.25, 0.5), tb.at(0.75, 0.5)};
  const cplx check_x[2] = {xb.at(0.5, 0.7), xb.at(0.2, 0.3)};
  const cplx check_t[2] = {tb.at(0.4, 0.3), tb.at(0.9, 0.6)};
  frame_ = Frame{};
  try {
    cplx raw[2], closed[2];
    for (int i = 0; i < 2; ++i) {
      raw[i] = tau_at(fit_x[i], fit_t[i]);
      closed[i] = eval_at(tau_closed, fit_x[i], fit_t[i]);
    }
    Frame fr;
    fr.c = (closed[0] - closed[1]) / (raw[0] - raw[1]);
    fr.d = closed[0] - fr.c * raw[0];
    for (int i = 0; i < 2; ++i) {
      const cplx want = eval_at(tau_closed, check_x[i], check_t[i]);
      const cplx got = fr.tau(tau_at(check_x[i], check_t[i]));
      fr.residual = std::max(fr.residual, std::abs(want - got) / (1.0 + std::abs(want)));
    }
    if (fr.residual <= 1e-9 && fr.c != 0.0) {
      fr.calibrated = true;
      frame_ = fr;
    } else {
      frame_.residual = fr.residual;
    }
  } catch (const ExprError&) {
    frame_.residual = INFINITY;
  }
}

cplx tau_map(const Decomposition& dec, cplx xv, cplx tv, cplx basepoint_x, std::span<const cplx> avoid_x) {
  ScalarPair flat;
  const ReducedEquation red(flat, dec, basepoint_x, {avoid_x.begin(), avoid_x.end()});
  return red.tau_at(xv, tv);
}

cplx gauge(const Decomposition& dec, cplx xv, cplx basepoint_x, std::span<const cplx> avoid_x) {
  ScalarPair flat;
  const ReducedEquation red(flat, dec, basepoint_x, {avoid_x.begin(), avoid_x.end()});
  return red.gauge_at(xv);
}

Coefficients reduced_coefficients(const ReducedEquation& red, cplx xv, cplx tv) { return red.coefficients_at(xv, tv); }

}  // namespace fuchs

#include "fuchs/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fuchs/scalarize.hpp"

namespace fuchs {

Pipeline build_pipeline(std::string_view id, const Config& cfg) {
  Pipeline pl{instantiate(id, cfg.params), {}, {}, {}, std::nullopt};
  pl.region = probe_region(pl.inst, cfg.seed, cfg.probes, cfg.region);
  const CatalogEntry& entry = *pl.inst.entry;
  pl.sp = pl.inst.direct ? *pl.inst.direct : scalar_coefficients(*pl.inst.lax, entry.component, pl.region.probes);
  pl.dec = decompose(pl.sp, pl.region);
  pl.red.emplace(pl.sp, pl.dec, pl.region.basepoint_x, pl.region.avoid_x);
  if (!entry.tau_closed.empty()) pl.red->calibrate(pl.inst.bind(entry.tau_closed), pl.region.x_box, pl.region.t_box);
  return pl;
}

Sample sample_at(const Pipeline& pl, cplx xv, cplx tv) {
  const ReducedEquation& red = *pl.red;
  const cplx Ex = red.E(xv);
  const cplx raw = tv * Ex + red.S(xv);
  const Coefficients c = red.frame().coefficients(red.coefficients_at(xv, tv, Ex));
  return {xv, tv, red.frame().tau(raw), c.P, c.Q};
}

double deviation(const Sample& a, const Sample& b) {
  const double diff = std::abs(a.P - b.P) + std::abs(a.Q - b.Q);
  return diff / std::max(1.0, std::abs(a.P) + std::abs(a.Q)) + kDeviationFloor;
}

Independence check_t_independence(const Pipeline& pl, std::size_t n_pairs, std::uint64_t seed) {
  const ReducedEquation& red = *pl.red;
  const ProbeRegion& rg = pl.region;
  Rng rng(seed, "pairs/" + pl.id());
  Independence out;
  constexpr double clearance = 0.05;
  for (std::size_t pair = 0; pair < n_pairs; ++pair) {
    bool found = false;
    for (int outer = 0; outer < 200 && !found; ++outer) {
      const cplx x1 = rng.in(rg.x_box);
      const cplx t1 = rng.in(rg.t_box);
      if (pl.inst.near_singular(x1, t1, clearance)) continue;
      const cplx E1 = red.E(x1);
      const cplx tau = t1 * E1 + red.S(x1);
      for (int inner = 0; inner < 64; ++inner) {
        const cplx x2 = rng.in(rg.x_box);
        if (std::abs(x2 - x1) < 0.1) continue;
        const cplx E2 = red.E(x2);
        const cplx t2 = (tau - red.S(x2)) / E2;
        if (!rg.t_box.contains(t2) || pl.inst.near_singular(x2, t2, clearance)) continue;
        const Sample a = sample_at(pl, x1, t1);
        const Sample b = sample_at(pl, x2, t2);
        out.max_deviation = std::max(out.max_deviation, deviation(a, b));
        out.samples.push_back(a);
        out.samples.push_back(b);
        found = true;
        break;
      }
    }
    if (!found) throw VerifyError("no tau-matched pair inside the probe boxes of " + pl.id());
  }
  return out;
}

cplx Match::Q(cplx tau) const {
  const cplx Qv = -(c[0] + c[1] * tau + c[2] / tau + c[3] / (tau * tau));
  const cplx Pv = P(tau);
  const cplx dP = -p1 / (tau * tau);
  return Qv + Pv * Pv / 4.0 + dP / 2.0;
}

namespace {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct Fit {
  CVector coef;
  double residual = 0.0;
  std::vector<double> contribution;  ///< |coef_j| * max |column_j|
  double scale = 0.0;                ///< max |value|
};

/// Least squares with columns scaled to unit max norm.
Fit least_squares(const CMatrix& A, const CVector& y) {
  const Eigen::Index m = A.cols();
  CMatrix As = A;
  std::vector<double> norms(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    const double n = A.col(j).cwiseAbs().maxCoeff();
    norms[static_cast<std::size_t>(j)] = n;
    if (n > 0.0) As.col(j) /= n;
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(As);
  qr.setThreshold(1e-12);
  if (qr.rank() < m) throw VerifyError("tau samples too clustered for the fit");
  CVector cs = qr.solve(y);
  Fit fit;
  fit.coef = cs;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double n = norms[static_cast<std::size_t>(j)];
    fit.contribution.push_back(std::abs(cs(j)));
    if (n > 0.0) fit.coef(j) = cs(j) / n;
  }
  fit.scale = y.cwiseAbs().maxCoeff();
  fit.residual = (As * cs - y).cwiseAbs().maxCoeff() / (1.0 + fit.scale);
  return fit;
}

}  // namespace

Match match_classical(const std::vector<Sample>& samples) {
  std::vector<cplx> taus;
  for (const Sample& s : samples) {
    const bool seen = std::any_of(taus.begin(), taus.end(),
                                  [&](cplx u) { return std::abs(u - s.tau) <= 1e-9 * (1.0 + std::abs(u)); });
    if (!seen) taus.push_back(s.tau);
  }
  if (taus.size() < 8) throw VerifyError("fewer than 8 distinct tau samples");
  for (const Sample& s : samples) {
    if (s.tau == 0.0) throw VerifyError("sample at tau = 0");
  }

  const auto n = static_cast<Eigen::Index>(samples.size());
  CMatrix AP(n, 2);
  CVector yP(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = samples[static_cast<std::size_t>(i)];
    AP(i, 0) = 1.0;
    AP(i, 1) = 1.0 / s.tau;
    yP(i) = s.P;
  }
  const Fit fp = least_squares(AP, yP);

  Match m;
  m.p0 = fp.coef(0);
  m.p1 = fp.coef(1);
  CMatrix AQ(n, 4);
  CVector yQ(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = samples[static_cast<std::size_t>(i)];
    const cplx tau = s.tau;
    const cplx Pm = m.P(tau);
    const cplx dP = -m.p1 / (tau * tau);
    AQ(i, 0) = 1.0;
    AQ(i, 1) = tau;
    AQ(i, 2) = 1.0 / tau;
    AQ(i, 3) = 1.0 / (tau * tau);
    yQ(i) = -(s.Q - Pm * Pm / 4.0 - dP / 2.0);
  }
  const Fit fq = least_squares(AQ, yQ);
  for (int j = 0; j < 4; ++j) m.c[static_cast<std::size_t>(j)] = fq.coef(j);
  m.residual = std::max(fp.residual, fq.residual);

  const double cut = 1e-7 * (1.0 + fq.scale);
  bool on[4];
  for (int j = 0; j < 4; ++j) on[j] = fq.contribution[static_cast<std::size_t>(j)] > cut;
  const cplx c0 = m.c[0], c1 = m.c[1], c2 = m.c[2], c3 = m.c[3];
  ClassicalTarget& tg = m.target;
  if (!on[0] && on[1] && !on[2] && !on[3]) {
    tg.kind = TargetKind::airy;
    tg.params["scale"] = std::pow(c1, -1.0 / 3.0);
  } else if (!on[1] && !on[2] && !on[3]) {
    tg.kind = TargetKind::constant;
    tg.params["c"] = on[0] ? c0 : cplx(0.0);
  } else if (on[0] && !on[1]) {
    const cplx lambda = 1.0 / (2.0 * std::sqrt(c0));
    tg.kind = TargetKind::whittaker;
    tg.params["kappa"] = on[2] ? -lambda * c2 : cplx(0.0);
    tg.params["mu2"] = on[3] ? (4.0 * c3 + 1.0) / 4.0 : cplx(0.25);
  } else if (on[0] && on[1] && !on[2] && !on[3]) {
    tg.kind = TargetKind::linear_potential;
    tg.params["a"] = c0;
    tg.params["b"] = c1;
  } else {
    tg.kind = TargetKind::none;
  }
  return m;
}

double target_error(const ClassicalTarget& got, const ClassicalTarget& want) {
  if (got.kind != want.kind) return std::numeric_limits<double>::infinity();
  double err = 0.0;
  for (const auto& [name, value] : want.params) {
    const auto it = got.params.find(name);
    if (it == got.params.end()) return std::numeric_limits<double>::infinity();
    err = std::max(err, std::abs(it->second - value) / std::max(1.0, std::abs(value)));
  }
  return err;
}

ClassicalTarget expected_target(const Instance& inst) {
  ClassicalTarget t;
  t.kind = inst.entry->expected_target.kind;
  for (const NamedExpr& p : inst.entry->expected_target.params) t.params[p.name] = evaluate(inst.bind(p.text), {});
  return t;
}

DenseTrace solve_linear_system(const Pipeline& pl, cplx t_fixed, const Path& x_path, const Vec2& initial,
                               const OdeOptions& opt, std::span<const double> land_on) {
  const OdeRhs rhs = pl.inst.lax ? linear_rhs(pl.inst.lax->A, Var::x, t_fixed) : scalar_rhs(pl.sp, t_fixed);
  return integrate_ode(rhs, x_path, initial, opt, land_on);
}

CrossValidation cross_validate(const Pipeline& pl, const Match* model, cplx t_fixed, double x_lo, double x_hi,
                               std::size_t nodes) {
  if (nodes < 5) throw VerifyError("cross-validation needs at least 5 nodes");
  const ReducedEquation& red = *pl.red;
  const Frame& fr = red.frame();
  OdeOptions opt;
  opt.rtol = 1e-13;
  opt.atol = 1e-15;
  const cplx x0 = pl.region.basepoint_x;
  Vec2 start{cplx(1.0, 0.0), cplx(0.5, 0.0)};
  if (x0 != cplx(x_lo)) {
    start = solve_linear_system(pl, t_fixed, route(x0, x_lo, pl.region.avoid_x), start, opt).final_value();
  }
  std::vector<double> land(nodes);
  for (std::size_t i = 0; i < nodes; ++i) land[i] = static_cast<double>(i) / static_cast<double>(nodes - 1);
  const DenseTrace trace = solve_linear_system(pl, t_fixed, Path{x_lo, x_hi}, start, opt, land);

  const bool second = pl.inst.lax && pl.sp.component == Component::second;
  const double dxs = (x_hi - x_lo) / static_cast<double>(nodes - 1);
  std::vector<cplx> xs(nodes), w(nodes), Es(nodes);
  double wmax = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    xs[i] = trace.point(land[i]);
    const cplx phi = trace.value(land[i])[second ? 1 : 0];
    w[i] = phi / red.gauge_at(xs[i]);
    Es[i] = red.E(xs[i]);
    wmax = std::max(wmax, std::abs(w[i]));
  }
  CrossValidation cv;
  for (std::size_t i = 2; i + 2 < nodes; ++i) {
    const cplx wx = (w[i - 2] - 8.0 * w[i - 1] + 8.0 * w[i + 1] - w[i + 2]) / (12.0 * dxs);
    const cplx wxx = (-w[i - 2] + 16.0 * w[i - 1] - 30.0 * w[i] + 16.0 * w[i + 1] - w[i + 2]) / (12.0 * dxs * dxs);
    auto [tx, txx] = red.tau_derivatives(xs[i], t_fixed, Es[i]);
    tx *= fr.c;
    txx *= fr.c;
    const cplx wt = wx / tx;
    const cplx wtt = (wxx - txx * wt) / (tx * tx);
    cplx P, Q;
    if (model) {
      const cplx tau = fr.tau(t_fixed * Es[i] + red.S(xs[i]));
      P = model->P(tau);
      Q = model->Q(tau);
    } else {
      const Coefficients c = fr.coefficients(red.coefficients_at(xs[i], t_fixed, Es[i]));
      P = c.P;
      Q = c.Q;
    }
    cv.residual = std::max(cv.residual, std::abs(wtt + P * wt + Q * w[i]));
    ++cv.points;
  }
  cv.residual /= wmax;
  return cv;
}

double first_integral_residual(const Pipeline& pl, std::span<const Binding> probes) {
  const ReducedEquation& red = *pl.red;
  const Program f(pl.dec.f), h(pl.dec.h);
  constexpr double step = 2e-3;
  auto d5 = [](cplx m2, cplx m1, cplx p1, cplx p2) { return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * step); };
  double worst = 0.0;
  for (const Binding& b : probes) {
    const cplx xv = *b.x, tv = *b.t;
    const cplx tx = d5(red.tau_at(xv - 2.0 * step, tv), red.tau_at(xv - step, tv), red.tau_at(xv + step, tv),
                       red.tau_at(xv + 2.0 * step, tv));
    const cplx tt = d5(red.tau_at(xv, tv - 2.0 * step), red.tau_at(xv, tv - step), red.tau_at(xv, tv + step),
                       red.tau_at(xv, tv + 2.0 * step));
    worst = std::max(worst, std::abs(tx - (f(b) + tv * h(b)) * tt));
  }
  return worst;
}

double basepoint_covariance(const Pipeline& pl, cplx other_basepoint) {
  const ReducedEquation& a = *pl.red;
  const ReducedEquation b(pl.sp, pl.dec, other_basepoint, pl.region.avoid_x);
  const Box& xb = pl.region.x_box;
  const Box& tb = pl.region.t_box;
  const cplx xs[4] = {xb.at(0.2, 0.5), xb.at(0.8, 0.5), xb.at(0.5, 0.2), xb.at(0.4, 0.8)};
  const cplx ts[4] = {tb.at(0.3, 0.4), tb.at(0.6, 0.6), tb.at(0.8, 0.5), tb.at(0.2, 0.7)};
  cplx ta[4], tbv[4], ratio[4];
  for (int i = 0; i < 4; ++i) {
    ta[i] = a.tau_at(xs[i], ts[i]);
    tbv[i] = b.tau_at(xs[i], ts[i]);
    ratio[i] = b.E(xs[i]) / a.E(xs[i]);
  }
  CMatrix A(3, 2);
  CVector y(3);
  for (int i = 0; i < 3; ++i) {
    A(i, 0) = ta[i];
    A(i, 1) = 1.0;
    y(i) = tbv[i];
  }
  const CVector cd = A.colPivHouseholderQr().solve(y);
  double miss = std::abs(tbv[3] - (cd(0) * ta[3] + cd(1))) / (1.0 + std::abs(tbv[3]));
  for (int i = 0; i < 3; ++i) miss = std::max(miss, std::abs(tbv[i] - (cd(0) * ta[i] + cd(1))) / (1.0 + std::abs(tbv[i])));
  for (int i = 1; i < 4; ++i) miss = std::max(miss, std::abs(ratio[i] - ratio[0]) / std::abs(ratio[0]));
  return miss;
}

namespace {

double expected_decomposition_error(const Pipeline& pl) {
  const ExpectedDecomposition& ed = *pl.inst.entry->expected_decomposition;
  const std::pair<const std::string*, const Expr*> parts[4] = {
      {&ed.f, &pl.dec.f}, {&ed.h, &pl.dec.h}, {&ed.R, &pl.dec.R}, {&ed.M, &pl.dec.M}};
  double err = 0.0;
  for (const auto& [text, got] : parts) {
    const Expr want = pl.inst.bind(*text);
    err = std::max(err, max_abs(*got - want, pl.region.probes) / (1.0 + max_abs(want, pl.region.probes)));
  }
  return err;
}

template <class F>
void stage(VerificationReport& r, const char* name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    r.errors.push_back(std::string(name) + ": " + e.what());
  }
}

}  // namespace

VerificationReport full_report(std::string_view id, const Config& cfg) {
  VerificationReport r;
  r.id = std::string(id);
  r.tol = cfg.tol;
  std::optional<Instance> inst;
  stage(r, "catalog", [&] { inst = instantiate(id, cfg.params); });
  if (!inst) return r;
  const CatalogEntry& entry = *inst->entry;
  const Box t_box = cfg.region.t_box.value_or(entry.t_box);
  const Box x_box = cfg.region.x_box.value_or(entry.x_box);

  stage(r, "flow", [&] {
    Rng rng(cfg.seed, "flow/" + entry.id);
    std::size_t taken = 0;
    for (std::size_t attempts = 0; taken < cfg.flow_points; ++attempts) {
      if (attempts > 100000) throw VerifyError("t box is covered by singular points");
      const cplx tv = rng.in(t_box);
      bool near = false;
      for (const Expr& s : inst->singular_t) near = near || std::abs(tv - evaluate(s, {})) < 0.05;
      if (near) continue;
      r.flow_max = std::max(r.flow_max, flow_residual(*inst, tv));
      ++taken;
    }
  });

  if (inst->lax) {
    stage(r, "frobenius", [&] {
      const FrobeniusResidual fr(*inst->lax);
      const double n = static_cast<double>(std::max<std::size_t>(cfg.grid, 2) - 1);
      double worst = 0.0;
      for (std::size_t i = 0; i < cfg.grid; ++i) {
        for (std::size_t j = 0; j < cfg.grid; ++j) {
          const double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
          const cplx xv = x_box.at(u, v), tv = t_box.at(v, u);
          if (inst->near_singular(xv, tv, 0.05)) continue;
          worst = std::max(worst, fr(xv, tv));
        }
      }
      r.frobenius_max = worst;
    });
  }

  std::optional<Pipeline> pl;
  stage(r, "reduction", [&] { pl = build_pipeline(id, cfg); });
  if (pl) {
    r.decomposition_residual = pl->dec.residual;
    r.case_tag = pl->red->case_tag();
    r.exponent_A = pl->dec.exponent_A;
    r.frame = pl->red->frame();
    if (entry.expected_decomposition) {
      stage(r, "decomposition", [&] { r.expected_decomposition_error = expected_decomposition_error(*pl); });
    }
    if (inst->lax) {
      stage(r, "scalarize", [&] {
        JointSolution sol{&*inst->lax, pl->region.basepoint_x, t_box.at(0.5, 0.5)};
        sol.avoid_x = pl->region.avoid_x;
        // Interior points: the stencil error grows like (h / distance to a pole)^4.
        const std::pair<cplx, cplx> points[3] = {{x_box.at(0.3, 0.5), t_box.at(0.5, 0.5)},
                                                 {x_box.at(0.6, 0.7), t_box.at(0.3, 0.6)},
                                                 {x_box.at(0.9, 0.3), t_box.at(0.8, 0.4)}};
        double worst = 0.0;
        for (const auto& [xv, tv] : points) worst = std::max(worst, scalar_residual(pl->sp, sol, xv, tv).max());
        r.scalar_residual_max = worst;
      });
    }
    stage(r, "first_integral", [&] { r.first_integral_max = first_integral_residual(*pl, pl->region.probes); });
    std::optional<Independence> ind;
    stage(r, "independence", [&] {
      ind = check_t_independence(*pl, cfg.n_pairs, cfg.seed);
      r.t_independence_max = ind->max_deviation;
    });
    if (ind) {
      stage(r, "match", [&] {
        r.match = match_classical(ind->samples);
        if (entry.expected_target.kind != TargetKind::none) {
          r.target_error = target_error(r.match->target, expected_target(*inst));
        }
      });
    }
    stage(r, "crossval", [&] {
      const Match* model = r.match && r.match->residual <= cfg.tol.match ? &*r.match : nullptr;
      r.cross_validation_residual = cross_validate(*pl, model, 1.0, 1.6, 2.5, cfg.crossval_points).residual;
    });
  }

  auto under = [](const std::optional<double>& v, double tol) { return !v || *v <= tol; };
  const Tolerances& t = cfg.tol;
  r.passed = r.errors.empty() && r.flow_max <= t.flow && under(r.frobenius_max, t.frobenius) &&
             under(r.scalar_residual_max, t.scalar) && under(r.decomposition_residual, t.decomposition) &&
             under(r.expected_decomposition_error, t.decomposition) &&
             under(r.first_integral_max, t.first_integral) && under(r.t_independence_max, t.independence) &&
             (!r.match || r.match->residual <= t.match) && under(r.target_error, t.match) &&
             under(r.cross_validation_residual, t.crossval);
  return r;
}

}  // namespace fuchs

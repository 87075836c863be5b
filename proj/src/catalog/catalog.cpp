#include "fuchs/catalog.hpp"

#include <algorithm>

#include "families.hpp"
#include "fuchs/program.hpp"

namespace fuchs {

const char* to_string(Family f) {
  switch (f) {
    case Family::PII: return "PII";
    case Family::PIII: return "PIII";
    case Family::PIV: return "PIV";
    case Family::PV: return "PV";
    case Family::PV_Kitaev: return "PV_Kitaev";
  }
  return "?";
}

const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::airy: return "airy";
    case TargetKind::whittaker: return "whittaker";
    case TargetKind::constant: return "constant";
    case TargetKind::linear_potential: return "linear_potential";
    case TargetKind::none: return "none";
  }
  return "?";
}

std::optional<TargetKind> target_kind_from_string(std::string_view s) {
  for (auto k : {TargetKind::airy, TargetKind::whittaker, TargetKind::constant, TargetKind::linear_potential,
                 TargetKind::none}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

namespace {

void require_not(const ParamValues& p, const char* name, double bad, const char* why) {
  if (std::abs(p.at(name) - cplx(bad, 0.0)) < 1e-12) {
    throw CatalogError(std::string("parameter ") + name + " = " + format_double(bad) + " is degenerate: " + why);
  }
}

std::vector<CatalogEntry> build_entries() {
  std::vector<CatalogEntry> out;

  {
    CatalogEntry e;
    e.id = "PII.y0";
    e.family = Family::PII;
    e.solution = "y = 0 at theta = 1/2 (alpha = 0)";
    e.fixed_params = {{"theta", "1/2"}};
    e.closed_forms = {{"y", "0"}, {"z", "-t/2"}, {"u", "1"}};
    e.basepoint_x = 1.0;
    e.tau_closed = "x^2 + t";
    e.gauge_closed = "1";
    e.expected_decomposition = ExpectedDecomposition{"2*x", "0", "0", "0"};
    e.expected_target = {TargetKind::airy, {{"scale", "4^(1/3)"}}};
    out.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "PII.y_inv_t";
    e.family = Family::PII;
    e.solution = "y = -1/t at theta = -1/2 (alpha = 1), second component";
    e.fixed_params = {{"theta", "-1/2"}};
    e.closed_forms = {{"y", "-1/t"}, {"z", "-t/2"}, {"u", "t"}};
    e.component = Component::second;
    e.basepoint_x = 1.0;
    e.singular_t = {"0"};
    e.tau_closed = "x^2 + t";
    e.gauge_closed = "1";
    e.expected_decomposition = ExpectedDecomposition{"2*x", "0", "0", "0"};
    e.expected_target = {TargetKind::airy, {{"scale", "4^(1/3)"}}};
    out.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "PIII.y1";
    e.family = Family::PIII;
    e.solution = "y = 1 with theta_0 = theta_inf - 1";
    e.free_params = {{"theta_inf", Rational(5, 2)}};
    e.fixed_params = {{"theta_0", "theta_inf - 1"}};
    e.closed_forms = {{"y", "1"}, {"z", "(1 - 2*theta_inf)/4"}, {"w", "exp(2*t + theta_inf*log(t))"}};
    e.basepoint_x = 2.0;
    e.singular_x = {"0", "1", "-1"};
    e.singular_t = {"0"};
    e.tau_closed = "(x - 1)^2*t/x";
    e.gauge_closed = "exp((theta_inf - 1)/2*log(x) + (1 - 2*theta_inf)/2*log(x - 1))";
    e.expected_decomposition =
        ExpectedDecomposition{"0", "(x + 1)/(x*(x - 1))", "(theta_inf - 1)/(2*x) - (2*theta_inf - 1)/(2*(x - 1))", "-1"};
    e.expected_target = {TargetKind::whittaker, {{"kappa", "(theta_inf - 1)/2"}, {"mu2", "1/16"}}};
    e.validate = [](const ParamValues& p) {
      require_not(p, "theta_inf", 0.5, "z vanishes identically");
      require_not(p, "theta_inf", 1.0, "the first-derivative exponent collapses");
    };
    out.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "PIV.y_m2t";
    e.family = Family::PIV;
    e.solution = "y = -2t at theta_0 = theta_inf = 1/2";
    e.fixed_params = {{"theta_0", "1/2"}, {"theta_inf", "1/2"}};
    e.closed_forms = {{"y", "-2*t"}, {"z", "1"}, {"u", "1"}};
    e.variants = {{"theta_0 = -1/2, theta_inf = 1/2, z = 0; same scalar pair",
                   {{"theta_0", "-1/2"}, {"theta_inf", "1/2"}},
                   {{"y", "-2*t"}, {"z", "0"}, {"u", "1"}}}};
    e.basepoint_x = 1.0;
    e.singular_x = {"0", "-t"};
    e.singular_t = {"0"};
    e.tau_closed = "t*x + x^2/2";
    e.gauge_closed = "x^(-1/2)";
    e.expected_decomposition = ExpectedDecomposition{"1", "1/x", "-1/(2*x)", "0"};
    e.expected_target = {TargetKind::constant, {{"c", "1"}}};
    out.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "PIV.y_m2t3";
    e.family = Family::PIV;
    e.solution = "y = -2t/3 at theta_0 = -1/6, theta_inf = 1/2";
    e.fixed_params = {{"theta_0", "-1/6"}, {"theta_inf", "1/2"}};
    e.closed_forms = {{"y", "-2*t/3"}, {"z", "-2*t^2/9"}, {"u", "exp(-2*t^2/3)"}};
    e.variants = {{"theta_0 = 1/6, theta_inf = 1/2, z = -2t^2/9 + 1/3; same scalar pair",
                   {{"theta_0", "1/6"}, {"theta_inf", "1/2"}},
                   {{"y", "-2*t/3"}, {"z", "-2*t^2/9 + 1/3"}, {"u", "exp(-2*t^2/3)"}}}};
    e.basepoint_x = 1.0;
    e.singular_x = {"0", "-t/3"};
    e.singular_t = {"0"};
    e.tau_closed = "t*x^(1/3) + 3/4*x^(4/3)";
    e.gauge_closed = "x^(-1/6)";
    e.expected_decomposition = ExpectedDecomposition{"1", "1/(3*x)", "-1/(6*x)", "2*t/3"};
    e.expected_target = {TargetKind::airy, {{"scale", "(3/4)^(1/3)"}}};
    out.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "PV.y_lin";
    e.family = Family::PV;
    e.solution = "y = 1 - t/(theta_1 - 1) at theta_0 = 0, theta_inf = 2 - theta_1";
    e.free_params = {{"theta_1", Rational(3)}};
    e.fixed_params = {{"theta_0", "0"}, {"theta_inf", "2 - theta_1"}};
    e.closed_forms = {{"y", "1 - t/(theta_1 - 1)"},
                      {"z", "0"},
                      {"u", "exp((2 - theta_1)*log(t) + t)/(theta_1 - 1 - t)"}};
    e.basepoint_x = 2.0;
    e.singular_x = {"0", "1"};
    e.singular_t = {"0", "theta_1 - 1"};
    e.tau_closed = "t*(x - 1)";
    e.gauge_closed = "exp((theta_1 - 2)/2*log(x - 1))";
    e.expected_decomposition = ExpectedDecomposition{"0", "1/(x - 1)", "(theta_1 - 2)/(2*(x - 1))", "-1/2"};
    e.expected_target = {TargetKind::whittaker, {{"kappa", "(1 - theta_1)/2"}, {"mu2", "theta_1^2/4"}}};
    e.validate = [](const ParamValues& p) {
      require_not(p, "theta_1", 1.0, "y = 1 - t/(theta_1 - 1) is undefined");
    };
    out.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "PV.y_m1";
    e.family = Family::PV;
    e.solution = "y = -1 at theta_0 = theta_1 = 1/2";
    e.free_params = {{"theta_inf", Rational(1, 2)}};
    e.fixed_params = {{"theta_0", "1/2"}, {"theta_1", "1/2"}};
    e.closed_forms = {{"y", "-1"}, {"z", "-(t + 2 + 2*theta_inf)/8"}, {"u", "exp(t/2)"}};
    e.basepoint_x = 2.0;
    e.singular_x = {"0", "1", "(t - 2*(1 - theta_inf))/(2*t)"};
    e.singular_t = {"0"};
    e.tau_closed =
        "t*sqrt(x*(x - 1)) - (1 - theta_inf)*log((sqrt(x) - sqrt(x - 1))/(sqrt(x) + sqrt(x - 1)))";
    e.gauge_closed = "(x*(x - 1))^(-1/4)";
    e.expected_decomposition = ExpectedDecomposition{"(1 - theta_inf)/(x*(x - 1))", "(1/x + 1/(x - 1))/2",
                                                     "-1/(4*x) - 1/(4*(x - 1))", "-1/4"};
    e.expected_target = {TargetKind::constant, {{"c", "1/4"}}};
    e.validate = [](const ParamValues& p) {
      require_not(p, "theta_inf", 1.0, "f vanishes and the reduction degenerates");
    };
    out.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "PVdeg.kitaev_sqrt";
    e.family = Family::PV_Kitaev;
    e.solution = "y = 1 + kappa*sqrt(s) of the degenerate fifth equation; t below stands for z with s = z^2";
    e.free_params = {{"kappa", Rational(1)}, {"mu", Rational(1, 2)}};
    e.fixed_params = {{"theta_inf", "-mu*kappa^2"}};
    e.closed_forms = {{"y", "1 + kappa*t"},
                      {"a2", "theta_inf/(2*kappa*t)"},
                      {"a1", "(-2*t/kappa - t^2)*theta_inf/(2*kappa*t)"}};
    e.pre_substitution = "t -> z^2";
    e.direct_scalar_pair = true;
    e.basepoint_x = 2.0;
    e.singular_x = {"0", "1", "-1/(kappa*t)"};
    e.singular_t = {"0", "-1/kappa"};
    e.tau_closed = "t*sqrt(x - 1) - I/(2*kappa)*log((sqrt(x - 1) - I)/(sqrt(x - 1) + I))";
    e.gauge_closed = "(x - 1)^(-1/4)";
    e.expected_decomposition =
        ExpectedDecomposition{"1/(2*kappa*x*(x - 1))", "1/(2*(x - 1))", "-1/(4*(x - 1))", "1/(2*t)"};
    e.expected_target = {TargetKind::constant, {{"c", "2*mu*kappa^2"}}};
    e.validate = [](const ParamValues& p) {
      require_not(p, "kappa", 0.0, "the solution is constant");
      require_not(p, "mu", 0.0, "the target collapses to w'' = 0");
    };
    out.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "negative.PII_bad_y1";
    e.family = Family::PII;
    e.solution = "y = 1, z = -t/2 at theta = 1/2: not a solution";
    e.negative = true;
    e.fixed_params = {{"theta", "1/2"}};
    e.closed_forms = {{"y", "1"}, {"z", "-t/2"}, {"u", "1"}};
    e.basepoint_x = 2.0;
    e.singular_x = {"0", "1"};
    e.expected_target = {TargetKind::none, {}};
    out.push_back(std::move(e));
  }
  return out;
}

const std::vector<CatalogEntry>& entries() {
  static const std::vector<CatalogEntry> all = build_entries();
  return all;
}

Expr closed(const std::vector<NamedExpr>& forms, const char* name, const ParamValues& p) {
  for (const auto& f : forms) {
    if (f.name == name) return bind_parameters(parse(f.text), p);
  }
  throw CatalogError(std::string("closed form missing: ") + name);
}

}  // namespace

const std::vector<std::string>& list_entries() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : entries()) {
      if (!e.negative) v.push_back(e.id);
    }
    return v;
  }();
  return ids;
}

const std::vector<std::string>& list_all_entries() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v = list_entries();
    for (const auto& e : entries()) {
      if (e.negative) v.push_back(e.id);
    }
    return v;
  }();
  return ids;
}

const CatalogEntry& lookup(std::string_view id) {
  for (const auto& e : entries()) {
    if (e.id == id) return e;
  }
  throw CatalogError("no catalog entry '" + std::string(id) + "'");
}

Expr Instance::bind(const std::string& text) const { return bind_parameters(parse(text), params); }

std::vector<cplx> Instance::singular_x_at(cplx tv) const {
  std::vector<cplx> out;
  for (const Expr& e : singular_x) {
    try {
      out.push_back(evaluate(e, Binding(std::nullopt, tv)));
    } catch (const ExprError&) {
      // A point sent to infinity at this t does not obstruct paths.
    }
  }
  return out;
}

bool Instance::near_singular(cplx xv, cplx tv, double clearance) const {
  for (const cplx& p : singular_x_at(tv)) {
    if (std::abs(xv - p) < clearance) return true;
  }
  for (const Expr& e : singular_t) {
    if (std::abs(tv - evaluate(e, {})) < clearance) return true;
  }
  return false;
}

Instance instantiate(std::string_view id, const ParamOverrides& overrides, std::size_t variant) {
  const CatalogEntry& entry = lookup(id);
  if (variant > entry.variants.size()) throw CatalogError("entry " + entry.id + " has no variant " + std::to_string(variant));

  Instance inst;
  inst.entry = &entry;
  for (const auto& [name, value] : entry.free_params) inst.params[name] = value.value();
  for (const auto& [name, value] : overrides) {
    if (!entry.free_params.contains(name)) {
      throw CatalogError("entry " + entry.id + " has no free parameter '" + name + "'");
    }
    inst.params[name] = value.value();
  }
  const auto& fixed = variant == 0 ? entry.fixed_params : entry.variants[variant - 1].params;
  const auto& forms = variant == 0 ? entry.closed_forms : entry.variants[variant - 1].closed_forms;
  // Fixed parameters may refer to free ones and to earlier fixed ones.
  for (const auto& f : fixed) inst.params[f.name] = evaluate(bind_parameters(parse(f.text), inst.params), {});
  if (entry.validate) entry.validate(inst.params);

  const ParamValues& p = inst.params;
  auto P = [&](const char* name) { return Expr::constant(p.at(name)); };
  switch (entry.family) {
    case Family::PII: {
      const Expr y = closed(forms, "y", p), z = closed(forms, "z", p), u = closed(forms, "u", p);
      inst.lax = families::lax_PII(y, z, u, P("theta"));
      inst.flows = families::flows_PII(y, z, u, P("theta"));
      break;
    }
    case Family::PIII: {
      const Expr y = closed(forms, "y", p), z = closed(forms, "z", p), w = closed(forms, "w", p);
      inst.lax = families::lax_PIII(y, z, w, P("theta_inf"), P("theta_0"));
      inst.flows = families::flows_PIII(y, z, w, P("theta_inf"), P("theta_0"));
      break;
    }
    case Family::PIV: {
      const Expr y = closed(forms, "y", p), z = closed(forms, "z", p), u = closed(forms, "u", p);
      inst.lax = families::lax_PIV(y, z, u, P("theta_0"), P("theta_inf"));
      inst.flows = families::flows_PIV(y, z, u, P("theta_0"), P("theta_inf"));
      break;
    }
    case Family::PV: {
      const Expr y = closed(forms, "y", p), z = closed(forms, "z", p), u = closed(forms, "u", p);
      inst.lax = families::lax_PV(y, z, u, P("theta_0"), P("theta_1"), P("theta_inf"));
      inst.flows = families::flows_PV(y, z, u, P("theta_0"), P("theta_1"), P("theta_inf"));
      break;
    }
    case Family::PV_Kitaev: {
      inst.direct = families::scalar_pair_kitaev(P("kappa"), P("mu"));
      inst.flows = families::flows_kitaev(P("kappa"), P("mu"));
      // The stored closed forms must agree with the relations the flows encode.
      const Expr a2 = closed(forms, "a2", p);
      const Expr y = closed(forms, "y", p);
      inst.flows.push_back(a2 - P("theta_inf") / (Expr(2.0) * (y - Expr(1.0))));
      inst.flows.push_back(closed(forms, "a1", p) - (-(Expr(2.0) * t() / P("kappa")) - pow(t(), 2)) * a2);
      break;
    }
  }
  for (const auto& s : entry.singular_x) inst.singular_x.push_back(inst.bind(s));
  for (const auto& s : entry.singular_t) inst.singular_t.push_back(inst.bind(s));
  return inst;
}

double flow_residual(const Instance& inst, cplx tv) {
  double m = 0.0;
  const Binding b(std::nullopt, tv);
  for (const Expr& f : inst.flows) m = std::max(m, std::abs(evaluate(f, b)));
  return m;
}

}  // namespace fuchs

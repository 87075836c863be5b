#include "fuchs/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "fuchs/program.hpp"

namespace fuchs {

double Path::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) len += std::abs(waypoints[i] - waypoints[i - 1]);
  return len;
}

Path Path::reversed() const { return Path(std::vector<cplx>(waypoints.rbegin(), waypoints.rend())); }

void Path::validate() const {
  if (waypoints.size() < 2) throw std::invalid_argument("path needs at least two waypoints");
}

Path route(cplx a, cplx b, std::span<const cplx> avoid, double clearance) {
  std::vector<cplx> pts{a};
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 > 0.0) {
    for (const cplx& p : avoid) {
      const double s = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
      const cplx foot = a + s * d;
      if (std::abs(p - foot) >= clearance || s <= 0.0 || s >= 1.0) continue;
      // Step sideways by twice the clearance, on the side away from the point.
      cplx normal = cplx(-d.imag(), d.real()) / std::sqrt(len2);
      if (((p - foot) * std::conj(normal)).real() > 0.0) normal = -normal;
      pts.push_back(p + 2.0 * clearance * normal - clearance * d / std::sqrt(len2));
      pts.push_back(p + 2.0 * clearance * normal + clearance * d / std::sqrt(len2));
    }
  }
  pts.push_back(b);
  if (pts.size() > 2) {
    std::sort(pts.begin() + 1, pts.end() - 1, [&](cplx u, cplx v) {
      return ((u - a) * std::conj(d)).real() < ((v - a) * std::conj(d)).real();
    });
  }
  return Path(std::move(pts));
}

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  cplx a, b;
  double lo, hi;      // parameter range within the whole path
  cplx value;
  double error;
};

void nodes_for(cplx a, cplx b, cplx* out) {
  const cplx c = 0.5 * (a + b);
  const cplx h = 0.5 * (b - a);
  for (int j = 0; j < 7; ++j) {
    out[2 * j] = c - kXgk[j] * h;
    out[2 * j + 1] = c + kXgk[j] * h;
  }
  out[14] = c;
}

void finish(Interval& iv, const cplx* f) {
  const cplx h = 0.5 * (iv.b - iv.a);
  const double ah = std::abs(h);
  const cplx fc = f[14];
  cplx rk = kWgk[7] * fc;
  cplx rg = kWg[3] * fc;
  double resabs = kWgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const cplx s = f[2 * j] + f[2 * j + 1];
    rk += kWgk[j] * s;
    resabs += kWgk[j] * (std::abs(f[2 * j]) + std::abs(f[2 * j + 1]));
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  const cplx mean = 0.5 * rk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f[2 * j] - mean) + std::abs(f[2 * j + 1] - mean));
  }
  iv.value = rk * h;
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((rk - rg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  iv.error = err;
}

void check_finite(const cplx* f, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(f[i].real()) || !std::isfinite(f[i].imag())) {
      throw ExprError(ExprError::Kind::quadrature_nonconvergence, "integrand not finite on the path");
    }
  }
}

}  // namespace

QuadratureResult integrate(const BatchIntegrand& f, const Path& path, const QuadratureOptions& opt) {
  path.validate();
  QuadratureResult res;
  std::vector<Interval> ivs;
  const std::size_t nseg = path.waypoints.size() - 1;
  for (std::size_t i = 0; i < nseg; ++i) {
    if (path.waypoints[i] == path.waypoints[i + 1]) continue;
    ivs.push_back({path.waypoints[i], path.waypoints[i + 1], double(i), double(i + 1), {}, 0.0});
  }
  if (ivs.empty()) return res;

  std::vector<cplx> nodes(15 * ivs.size());
  std::vector<cplx> vals(nodes.size());
  for (std::size_t i = 0; i < ivs.size(); ++i) nodes_for(ivs[i].a, ivs[i].b, nodes.data() + 15 * i);
  f(nodes, vals);
  check_finite(vals.data(), vals.size());
  res.evaluations += nodes.size();
  for (std::size_t i = 0; i < ivs.size(); ++i) finish(ivs[i], vals.data() + 15 * i);

  auto totals = [&] {
    cplx v{};
    double e = 0.0;
    for (const auto& iv : ivs) {
      v += iv.value;
      e += iv.error;
    }
    return std::pair{v, e};
  };

  nodes.resize(30);
  vals.resize(30);
  for (;;) {
    auto [value, error] = totals();
    if (error <= opt.abs_tol + opt.rel_tol * std::abs(value)) break;
    if (ivs.size() >= opt.max_intervals) {
      throw ExprError(ExprError::Kind::quadrature_nonconvergence,
                      "quadrature did not converge (error estimate " + format_double(error) + ")");
    }
    auto worst = std::max_element(ivs.begin(), ivs.end(),
                                  [](const Interval& l, const Interval& r) { return l.error < r.error; });
    const cplx mid = 0.5 * (worst->a + worst->b);
    const double pmid = 0.5 * (worst->lo + worst->hi);
    if (pmid <= worst->lo || pmid >= worst->hi) {
      throw ExprError(ExprError::Kind::quadrature_nonconvergence, "quadrature interval underflow");
    }
    Interval left{worst->a, mid, worst->lo, pmid, {}, 0.0};
    Interval right{mid, worst->b, pmid, worst->hi, {}, 0.0};
    nodes_for(left.a, left.b, nodes.data());
    nodes_for(right.a, right.b, nodes.data() + 15);
    f(nodes, vals);
    check_finite(vals.data(), vals.size());
    res.evaluations += 30;
    finish(left, vals.data());
    finish(right, vals.data() + 15);
    *worst = left;
    ivs.push_back(right);
  }

  // Sum in contour order so the result does not depend on refinement history.
  std::sort(ivs.begin(), ivs.end(), [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
  for (const auto& iv : ivs) {
    res.value += iv.value;
    res.error += iv.error;
  }
  res.intervals = ivs.size();
  return res;
}

cplx integrate_along_path(const Expr& e, Var v, const Path& path, const Binding& b) {
  const Program prog(e);
  const std::optional<cplx>& other = v == Var::x ? b.t : b.x;
  std::vector<cplx> other_col;
  if (other) other_col.push_back(*other);
  return integrate(
             [&](std::span<const cplx> nodes, std::span<cplx> out) {
               if (v == Var::x) {
                 prog.eval(nodes, other_col, b.params, out);
               } else {
                 prog.eval(other_col, nodes, b.params, out);
               }
             },
             path)
      .value;
}

}  // namespace fuchs

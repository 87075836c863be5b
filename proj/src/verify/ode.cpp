#include "fuchs/ode.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "fuchs/program.hpp"

namespace fuchs {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

Vec2 axpy(const Vec2& y, cplx h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
  Vec2 out = y;
  for (int i = 0; i < 2; ++i) {
    cplx acc{};
    for (const auto& [c, k] : terms) acc += c * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

}  // namespace

cplx DenseTrace::point(double s) const {
  const std::size_t n = segments();
  std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(n - 1)));
  const cplx a = path_.waypoints[i];
  const cplx b = path_.waypoints[i + 1];
  return a + (s - static_cast<double>(i)) * (b - a);
}

Vec2 DenseTrace::value(double s) const {
  if (steps_.empty() || s <= steps_.front().s0) return y0_;
  auto it = std::upper_bound(steps_.begin(), steps_.end(), s, [](double v, const Step& st) { return v < st.s0; });
  const Step& st = *(it - 1);
  if (s >= st.s0 + st.h && it == steps_.end()) return st.y1;
  const double th = (s - st.s0) / st.h;
  const double th1 = 1.0 - th;
  Vec2 out;
  for (int i = 0; i < 2; ++i) {
    out[i] = st.r[0][i] + th * (st.r[1][i] + th1 * (st.r[2][i] + th * (st.r[3][i] + th1 * st.r[4][i])));
  }
  return out;
}

DenseTrace integrate_ode(const OdeRhs& f, const Path& path, const Vec2& y0, const OdeOptions& opt,
                         std::span<const double> land_on) {
  path.validate();
  DenseTrace tr;
  tr.path_ = path;
  tr.y0_ = y0;
  const std::size_t nseg = path.waypoints.size() - 1;

  std::vector<double> stops(land_on.begin(), land_on.end());
  for (std::size_t i = 1; i <= nseg; ++i) stops.push_back(static_cast<double>(i));
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  stops.erase(std::remove_if(stops.begin(), stops.end(),
                             [&](double v) { return v <= 0.0 || v > static_cast<double>(nseg); }),
              stops.end());

  Vec2 y = y0;
  double s = 0.0;
  double h = 0.01;
  std::size_t next = 0;
  std::size_t count = 0;

  auto seg_of = [&](double sv) {
    return std::min(static_cast<std::size_t>(std::floor(sv)), nseg - 1);
  };

  while (next < stops.size()) {
    const double target = stops[next];
    const std::size_t seg = seg_of(s);
    const cplx za = path.waypoints[seg];
    const cplx dz = path.waypoints[seg + 1] - za;
    auto z_at = [&](double sv) { return za + (sv - static_cast<double>(seg)) * dz; };
    // dy/ds = f(z(s), y) * dz/ds
    auto F = [&](double sv, const Vec2& yv) {
      Vec2 k = f(z_at(sv), yv);
      k[0] *= dz;
      k[1] *= dz;
      return k;
    };

    const Vec2 k1 = F(s, y);
    bool accepted = false;
    while (!accepted) {
      if (++count > opt.max_steps) throw OdeError("ode: step budget exhausted");
      bool lands = false;
      if (s + h >= target - 1e-14 * std::max(1.0, std::abs(target))) {
        h = target - s;
        lands = true;
      }
      if (h < opt.min_step) throw OdeError("ode: step size collapsed near s = " + format_double(s));
      const Vec2 k2 = F(s + c2 * h, axpy(y, h, {{a21, &k1}}));
      const Vec2 k3 = F(s + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      const Vec2 k4 = F(s + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const Vec2 k5 = F(s + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const Vec2 k6 = F(s + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const Vec2 y1 = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
      const Vec2 k7 = F(s + h, y1);

      double err = 0.0;
      for (int i = 0; i < 2; ++i) {
        const cplx ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
        err += std::norm(ei) / (sc * sc);
      }
      err = std::sqrt(err / 2.0);
      if (!std::isfinite(err)) err = 1e10;

      if (err <= 1.0) {
        DenseTrace::Step st;
        st.s0 = s;
        st.h = h;
        st.y1 = y1;
        for (int i = 0; i < 2; ++i) {
          const cplx ydiff = y1[i] - y[i];
          const cplx bspl = h * k1[i] - ydiff;
          st.r[0][i] = y[i];
          st.r[1][i] = ydiff;
          st.r[2][i] = bspl;
          st.r[3][i] = ydiff - h * k7[i] - bspl;
          st.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        tr.steps_.push_back(st);
        const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        const double hnew = h * grow;
        s = lands ? target : s + h;
        y = y1;
        if (lands) ++next;
        // Keep the step proposed before any clipping to the landing point.
        h = lands ? std::max(hnew, 1e-3) : hnew;
        accepted = true;
      } else {
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
    }
  }
  return tr;
}

Vec2 integrate_rk4(const OdeRhs& f, cplx a, cplx b, const Vec2& y0, std::size_t steps) {
  const cplx h = (b - a) / static_cast<double>(steps);
  Vec2 y = y0;
  auto add = [](const Vec2& v, cplx c, const Vec2& k) { return Vec2{v[0] + c * k[0], v[1] + c * k[1]}; };
  for (std::size_t i = 0; i < steps; ++i) {
    const cplx z = a + static_cast<double>(i) * h;
    const Vec2 k1 = f(z, y);
    const Vec2 k2 = f(z + 0.5 * h, add(y, 0.5 * h, k1));
    const Vec2 k3 = f(z + 0.5 * h, add(y, 0.5 * h, k2));
    const Vec2 k4 = f(z + h, add(y, h, k3));
    for (int j = 0; j < 2; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return y;
}

OdeRhs linear_rhs(const Matrix2& M, Var v, cplx fixed) {
  auto progs = std::make_shared<std::array<Program, 4>>(
      std::array<Program, 4>{Program(M.a11), Program(M.a12), Program(M.a21), Program(M.a22)});
  return [progs, v, fixed](cplx z, const Vec2& y) {
    const Binding b = v == Var::x ? Binding(z, fixed) : Binding(fixed, z);
    const auto& p = *progs;
    const cplx m11 = p[0](b), m12 = p[1](b), m21 = p[2](b), m22 = p[3](b);
    return Vec2{m11 * y[0] + m12 * y[1], m21 * y[0] + m22 * y[1]};
  };
}

OdeRhs scalar_rhs(const ScalarPair& sp, cplx tv) {
  auto progs = std::make_shared<std::array<Program, 2>>(std::array<Program, 2>{Program(sp.p1), Program(sp.q1)});
  return [progs, tv](cplx z, const Vec2& y) {
    const Binding b(z, tv);
    return Vec2{y[1], -(*progs)[0](b) * y[1] - (*progs)[1](b) * y[0]};
  };
}

}  // namespace fuchs

#include "families.hpp"

namespace fuchs::families {

namespace {

const Expr kHalf(0.5);

Expr D(const Expr& e) { return differentiate(e, Var::t); }

struct M2 {
  Expr a, b, c, d;
};

M2 operator*(const Expr& s, const M2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
M2 operator+(const M2& l, const M2& r) { return {l.a + r.a, l.b + r.b, l.c + r.c, l.d + r.d}; }

M2 sigma3() { return {Expr(1.0), Expr(), Expr(), Expr(-1.0)}; }

Matrix2 finish(const M2& m) { return {m.a, m.b, m.c, m.d}; }

}  // namespace

LaxPair lax_PII(const Expr& y, const Expr& z, const Expr& u, const Expr& theta) {
  const M2 off{Expr(), u, Expr(-2.0) * z / u, Expr()};
  const M2 c0{z + t() * kHalf, -(u * y), Expr(-2.0) * (theta + y * z) / u, -z - t() * kHalf};
  LaxPair lp;
  lp.A = finish(pow(x(), 2) * sigma3() + x() * off + c0);
  lp.B = finish((kHalf * x()) * sigma3() + kHalf * off);
  return lp;
}

std::vector<Expr> flows_PII(const Expr& y, const Expr& z, const Expr& u, const Expr& theta) {
  return {
      D(y) - (z + pow(y, 2) + t() * kHalf),
      D(z) + Expr(2.0) * y * z + theta,
      D(u) / u + y,
      // Second Painleve equation with alpha = 1/2 - theta.
      D(D(y)) - (Expr(2.0) * pow(y, 3) + t() * y + (kHalf - theta)),
  };
}

LaxPair lax_PIII(const Expr& y, const Expr& z, const Expr& w, const Expr& ti, const Expr& t0) {
  const Expr c21 = -((z - t()) * y + (ti + t0) * kHalf * (z - t()) / z + (ti - t0) * kHalf) / w;
  const M2 inv_x{-ti * kHalf, -(y * w * z), c21, ti * kHalf};
  const M2 inv_x2{z - t() * kHalf, -(w * z), (z - t()) / w, -z + t() * kHalf};
  const M2 inv_t{Expr(), -(y * w * z), c21, Expr()};
  const M2 inv_xt{-z + t() * kHalf, w * z, -(z - t()) / w, z - t() * kHalf};
  LaxPair lp;
  lp.A = finish((kHalf * t()) * sigma3() + (Expr(1.0) / x()) * inv_x + (Expr(1.0) / pow(x(), 2)) * inv_x2);
  lp.B = finish((kHalf * x()) * sigma3() + (Expr(1.0) / t()) * inv_t + (Expr(1.0) / (x() * t())) * inv_xt);
  return lp;
}

std::vector<Expr> flows_PIII(const Expr& y, const Expr& z, const Expr& w, const Expr& ti, const Expr& t0) {
  const Expr two(2.0);
  const Expr four(4.0);
  return {
      t() * D(y) - (four * z * pow(y, 2) - two * t() * pow(y, 2) + (two * ti - Expr(1.0)) * y + two * t()),
      t() * D(z) - (-(four * y * pow(z, 2)) + (four * t() * y - two * ti + Expr(1.0)) * z + (t0 + ti) * t()),
      t() * D(w) / w - (-((t0 + ti) * t() / z) - two * t() * y + ti),
  };
}

LaxPair lax_PIV(const Expr& y, const Expr& z, const Expr& u, const Expr& t0, const Expr& ti) {
  const Expr c21 = Expr(2.0) * (z - t0 - ti) / u;
  const M2 c0{t(), u, c21, -t()};
  const M2 inv_x{-z + t0, -(u * y) * kHalf, Expr(2.0) * z * (z - Expr(2.0) * t0) / (u * y), z - t0};
  LaxPair lp;
  lp.A = finish(x() * sigma3() + c0 + (Expr(1.0) / x()) * inv_x);
  lp.B = finish(x() * sigma3() + M2{Expr(), u, c21, Expr()});
  return lp;
}

std::vector<Expr> flows_PIV(const Expr& y, const Expr& z, const Expr& u, const Expr& t0, const Expr& ti) {
  const Expr two(2.0);
  const Expr four(4.0);
  return {
      D(y) - (-(four * z) + pow(y, 2) + two * t() * y + four * t0),
      D(z) - (-(two * pow(z, 2) / y) + (-y + four * t0 / y) * z + (t0 + ti) * y),
      D(u) / u + y + two * t(),
  };
}

LaxPair lax_PV(const Expr& y, const Expr& z, const Expr& u, const Expr& t0, const Expr& t1, const Expr& ti) {
  const Expr s1 = (t0 - t1 + ti) * kHalf;
  const Expr s2 = (t0 + t1 + ti) * kHalf;
  const M2 inv_x{z + t0 * kHalf, -(u * (z + t0)), z / u, -z - t0 * kHalf};
  const M2 inv_x1{-z - (t0 + ti) * kHalf, u * y * (z + s1), -((z + s2) / (u * y)), z + (t0 + ti) * kHalf};
  const M2 inv_t{Expr(), -(u * (z + t0 - y * (z + s1))), (z - (z + s2) / y) / u, Expr()};
  LaxPair lp;
  lp.A = finish((kHalf * t()) * sigma3() + (Expr(1.0) / x()) * inv_x + (Expr(1.0) / (x() - Expr(1.0))) * inv_x1);
  lp.B = finish((kHalf * x()) * sigma3() + (Expr(1.0) / t()) * inv_t);
  return lp;
}

std::vector<Expr> flows_PV(const Expr& y, const Expr& z, const Expr& u, const Expr& t0, const Expr& t1,
                           const Expr& ti) {
  const Expr s1 = (t0 - t1 + ti) * kHalf;
  const Expr s2 = (t0 + t1 + ti) * kHalf;
  const Expr one(1.0);
  const Expr two(2.0);
  return {
      t() * D(y) - (t() * y - two * z * pow(y - one, 2) -
                    (y - one) * (s1 * y - (Expr(3.0) * t0 + t1 + ti) * kHalf)),
      t() * D(z) - (y * z * (z + s1) - (z + t0) * (z + s2) / y),
      t() * D(u) / u - (-(two * z) - t0 + y * (z + s1) + (z + s2) / y),
  };
}

ScalarPair scalar_pair_kitaev(const Expr& k, const Expr& mu) {
  const Expr one(1.0);
  const Expr z = t();
  const Expr x1 = x() - one;
  ScalarPair sp;
  sp.component = Component::first;
  sp.p1 = one / x() + one / x1 - k * z / (k * z * x() + one);
  sp.q1 = mu / (Expr(2.0) * pow(x(), 2)) - one / (Expr(16.0) * pow(x1, 2)) +
          (Expr(4.0) * mu * k * z + Expr(2.0) * mu - one) / (Expr(4.0) * x()) +
          pow(k, 2) * pow(z, 2) / (Expr(4.0) * (k * z + one) * (one + k * z * x())) -
          (Expr(2.0) * mu * pow(k, 3) * pow(z, 3) + Expr(6.0) * mu * pow(k, 2) * pow(z, 2) +
           Expr(6.0) * mu * k * z + Expr(2.0) * mu - one) /
              (Expr(4.0) * (k * z + one) * x1);
  sp.p2 = one / (Expr(2.0) * k * x() * x1) + z / (Expr(2.0) * x1);
  sp.q2 = -(one / (Expr(4.0) * x1)) + sp.p2 / (Expr(2.0) * z);
  return sp;
}

std::vector<Expr> flows_kitaev(const Expr& k, const Expr& mu) {
  // Written in the original deformation variable s = t, then s -> z^2.
  const Expr s = t();
  const Expr rs = sqrt(s);
  const Expr one(1.0);
  const Expr theta_inf = -(mu * pow(k, 2));
  const Expr y = one + k * rs;
  const Expr a2 = theta_inf / (Expr(2.0) * k * rs);
  const Expr a1 = (-(Expr(2.0) * rs / k) - s) * a2;
  // Degenerate fifth Painleve equation, alpha = mu, beta = -1/8, gamma = -mu kappa^2, delta = 0.
  const Expr alpha = mu;
  const Expr beta(-0.125);
  const Expr gamma = theta_inf;
  const Expr dy = D(y);
  const Expr pv = D(dy) - ((one / (Expr(2.0) * y) + one / (y - one)) * pow(dy, 2) - dy / s +
                           pow(y - one, 2) / pow(s, 2) * (alpha * y + beta / y) + gamma * y / s);
  std::vector<Expr> out{
      pv,
      D(s * D(log(a2))) - (theta_inf * D(a1 / a2) + Expr(2.0) * a2 + theta_inf),
      a2 - theta_inf / (Expr(2.0) * (y - one)),
  };
  for (Expr& e : out) e = substitute(e, Var::t, pow(t(), 2));
  return out;
}

}  // namespace fuchs::families

#include <unordered_map>

#include "fuchs/expr.hpp"

namespace fuchs {

Expr differentiate(const Expr& root, Var v) {
  std::unordered_map<const void*, Expr> memo;
  auto d = [&](auto&& self, const Expr& e) -> Expr {
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
    Expr out;
    switch (e.op()) {
      case Op::constant:
      case Op::parameter: break;
      case Op::variable: out = e.var() == v ? Expr(1.0) : Expr(); break;
      case Op::negate: out = -self(self, e.child(0)); break;
      case Op::add: out = self(self, e.child(0)) + self(self, e.child(1)); break;
      case Op::multiply: {
        const Expr& a = e.child(0);
        const Expr& b = e.child(1);
        out = self(self, a) * b + a * self(self, b);
        break;
      }
      case Op::divide: {
        const Expr& a = e.child(0);
        const Expr& b = e.child(1);
        const Expr db = self(self, b);
        if (db.is_zero()) {
          out = self(self, a) / b;
        } else {
          out = (self(self, a) * b - a * db) / pow(b, 2);
        }
        break;
      }
      case Op::int_power:
      case Op::frac_power: {
        const Expr& b = e.child(0);
        const Rational r = e.exponent();
        const Expr db = self(self, b);
        if (!db.is_zero()) out = Expr(r.value()) * pow(b, r - Rational(1)) * db;
        break;
      }
      case Op::exp: out = e * self(self, e.child(0)); break;
      case Op::log: out = self(self, e.child(0)) / e.child(0); break;
      case Op::sqrt: {
        const Expr da = self(self, e.child(0));
        if (!da.is_zero()) out = da / (Expr(2.0) * e);
        break;
      }
    }
    memo.emplace(e.id(), out);
    return out;
  };
  return d(d, root);
}

}  // namespace fuchs

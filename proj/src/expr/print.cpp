#include <charconv>
#include <cmath>

#include "fuchs/expr.hpp"

namespace fuchs {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

namespace {

// 1: sum, 2: product/quotient, 3: unary minus, 4: power, 5: atom.
int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::add: return 1;
    case Op::multiply:
    case Op::divide: return 2;
    case Op::negate: return 3;
    case Op::int_power:
    case Op::frac_power: return 4;
    default: return 5;
  }
}

std::string constant_text(cplx v) {
  const double re = v.real();
  const double im = v.imag();
  if (im == 0.0) {
    if (re < 0.0 || std::signbit(re)) return "(" + format_double(re) + ")";
    return format_double(re);
  }
  std::string imag = format_double(std::abs(im)) + "*I";
  if (re == 0.0 && !std::signbit(re)) return "(" + std::string(im < 0 ? "-" : "") + imag + ")";
  return "(" + format_double(re) + (im < 0 ? "-" : "+") + imag + ")";
}

void emit(const Expr& e, std::string& out);

void emit_child(const Expr& c, int min_prec, bool leftmost, std::string& out) {
  const bool parens = precedence(c) < min_prec || (c.op() == Op::negate && !leftmost);
  if (parens) out += '(';
  emit(c, out);
  if (parens) out += ')';
}

void emit(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::constant: out += constant_text(e.value()); return;
    case Op::variable: out += to_string(e.var()); return;
    case Op::parameter: out += e.name(); return;
    case Op::negate:
      out += '-';
      emit_child(e.child(0), 4, true, out);
      return;
    case Op::add: {
      emit_child(e.child(0), 1, true, out);
      const Expr& r = e.child(1);
      if (r.op() == Op::negate) {
        out += " - ";
        emit_child(r.child(0), 2, true, out);
      } else {
        out += " + ";
        emit_child(r, 2, false, out);
      }
      return;
    }
    case Op::multiply:
    case Op::divide:
      emit_child(e.child(0), 2, true, out);
      out += e.op() == Op::multiply ? '*' : '/';
      emit_child(e.child(1), 3, false, out);
      return;
    case Op::int_power:
    case Op::frac_power: {
      emit_child(e.child(0), 5, true, out);
      const Rational& r = e.exponent();
      if (r.is_integer() && r.num >= 0) {
        out += '^' + std::to_string(r.num);
      } else {
        out += "^(" + r.str() + ")";
      }
      return;
    }
    case Op::exp:
    case Op::log:
    case Op::sqrt:
      out += to_string(e.op());
      out += '(';
      emit(e.child(0), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  emit(e, out);
  return out;
}

}  // namespace fuchs

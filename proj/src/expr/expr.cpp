#include "fuchs/expr.hpp"

#include <cctype>
#include <cmath>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "fuchs/kernels.hpp"

namespace fuchs {

struct Expr::Node {
  Op op = Op::constant;
  cplx value{};
  Var var = Var::x;
  std::string name;
  Rational exponent;
  std::vector<Expr> children;
};

// ---- Rational ---------------------------------------------------------------

namespace {

std::int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(v);
}

Rational make_rational(__int128 n, __int128 d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n;
  __int128 b = d;
  while (b != 0) {
    __int128 r = a % b;
    a = b;
    b = r;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  Rational out;
  out.num = checked(n);
  out.den = checked(d);
  return out;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) { *this = make_rational(n, d); }

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s) -> std::int64_t {
    s = trim(s);
    std::size_t i = 0;
    bool negative = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) negative = s[i++] == '-';
    if (i == s.size()) throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
    __int128 v = 0;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
        throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
      }
      v = v * 10 + (s[i] - '0');
      if (v > INT64_MAX) throw std::overflow_error("rational overflow");
    }
    return static_cast<std::int64_t>(negative ? -v : v);
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

Rational operator+(Rational a, Rational b) {
  return make_rational(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                       static_cast<__int128>(a.den) * b.den);
}
Rational operator-(Rational a, Rational b) { return a + Rational(-b.num, b.den); }
Rational operator*(Rational a, Rational b) {
  return make_rational(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}

// ---- Node access -------------------------------------------------------------

const char* to_string(Op op) {
  switch (op) {
    case Op::constant: return "constant";
    case Op::variable: return "variable";
    case Op::parameter: return "parameter";
    case Op::negate: return "negate";
    case Op::add: return "add";
    case Op::multiply: return "multiply";
    case Op::divide: return "divide";
    case Op::int_power: return "int_power";
    case Op::frac_power: return "frac_power";
    case Op::exp: return "exp";
    case Op::log: return "log";
    case Op::sqrt: return "sqrt";
  }
  return "?";
}

Expr make_node(Op op, std::vector<Expr> children, Rational exponent) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->children = std::move(children);
  n->exponent = exponent;
  return Expr(std::move(n));
}

namespace {

const std::shared_ptr<const Expr::Node>& zero_node() {
  static const std::shared_ptr<const Expr::Node> z = [] {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::constant;
    return n;
  }();
  return z;
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(double value) : Expr(constant(cplx{value, 0.0})) {}
Expr::Expr(cplx value) : Expr(constant(value)) {}

Expr Expr::constant(cplx value) {
  if (value == cplx{} && !std::signbit(value.real()) && !std::signbit(value.imag())) return Expr();
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  n->var = v;
  return Expr(std::move(n));
}

Expr Expr::parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::parameter;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
const cplx& Expr::value() const { return node_->value; }
Var Expr::var() const { return node_->var; }
const std::string& Expr::name() const { return node_->name; }
const Rational& Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::children() const { return node_->children; }

Expr x() {
  static const Expr v = Expr::variable(Var::x);
  return v;
}
Expr t() {
  static const Expr v = Expr::variable(Var::t);
  return v;
}
Expr param(std::string name) { return Expr::parameter(std::move(name)); }
Expr imaginary_unit() { return Expr::constant(cplx{0.0, 1.0}); }

// ---- Builders ----------------------------------------------------------------

namespace {

cplx int_pow_value(cplx base, std::int64_t n) {
  std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  cplx result{1.0, 0.0};
  cplx sq = base;
  bool first = true;
  while (k != 0) {
    if (k & 1U) {
      result = first ? sq : kernels::mul(result, sq);
      first = false;
    }
    k >>= 1U;
    if (k != 0) sq = kernels::mul(sq, sq);
  }
  if (n < 0) result = kernels::div(cplx{1.0, 0.0}, result);
  return result;
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(kernels::add(a.value(), b.value()));
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return make_node(Op::add, {a, b}, {});
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(kernels::neg(a.value()));
  if (a.op() == Op::negate) return a.child(0);
  return make_node(Op::negate, {a}, {});
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(kernels::mul(a.value(), b.value()));
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return make_node(Op::multiply, {a, b}, {});
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_one()) return a;
  if (b.is_zero()) return make_node(Op::divide, {a, b}, {});
  if (a.is_zero()) return Expr();
  if (a.is_constant() && b.is_constant()) return Expr::constant(kernels::div(a.value(), b.value()));
  return make_node(Op::divide, {a, b}, {});
}

Expr pow(const Expr& base, std::int64_t n) {
  if (n == 0) return Expr(1.0);
  if (n == 1) return base;
  if (base.is_constant() && !(base.is_zero() && n < 0)) {
    return Expr::constant(int_pow_value(base.value(), n));
  }
  return make_node(Op::int_power, {base}, Rational(n));
}

Expr pow(const Expr& base, Rational r) {
  if (r.is_integer()) return pow(base, r.num);
  if (base.is_constant() && base.value() != cplx{}) {
    return Expr::constant(std::exp(r.value() * std::log(base.value())));
  }
  return make_node(Op::frac_power, {base}, r);
}

Expr exp(const Expr& e) {
  if (e.is_constant()) return Expr::constant(std::exp(e.value()));
  return make_node(Op::exp, {e}, {});
}

Expr log(const Expr& e) {
  if (e.is_one()) return Expr();
  if (e.is_constant() && e.value() != cplx{}) return Expr::constant(std::log(e.value()));
  return make_node(Op::log, {e}, {});
}

Expr sqrt(const Expr& e) {
  if (e.is_constant()) return Expr::constant(std::sqrt(e.value()));
  return make_node(Op::sqrt, {e}, {});
}

// ---- Structural operations ----------------------------------------------------

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> c) {
  switch (e.op()) {
    case Op::negate: return -c[0];
    case Op::add: return c[0] + c[1];
    case Op::multiply: return c[0] * c[1];
    case Op::divide: return c[0] / c[1];
    case Op::int_power: return pow(c[0], e.exponent().num);
    case Op::frac_power: return pow(c[0], e.exponent());
    case Op::exp: return exp(c[0]);
    case Op::log: return log(c[0]);
    case Op::sqrt: return sqrt(c[0]);
    default: return e;
  }
}

template <class Leaf>
Expr transform(const Expr& root, Leaf&& leaf) {
  std::unordered_map<const void*, Expr> memo;
  auto go = [&](auto&& self, const Expr& e) -> Expr {
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
    Expr out;
    if (e.children().empty()) {
      out = leaf(e);
    } else {
      std::vector<Expr> c;
      c.reserve(e.children().size());
      bool changed = false;
      for (const Expr& ch : e.children()) {
        c.push_back(self(self, ch));
        changed = changed || c.back().id() != ch.id();
      }
      out = changed ? rebuild(e, std::move(c)) : e;
    }
    memo.emplace(e.id(), out);
    return out;
  };
  return go(go, root);
}

}  // namespace

Expr substitute(const Expr& e, Var v, const Expr& replacement) {
  return transform(e, [&](const Expr& leaf) {
    return leaf.op() == Op::variable && leaf.var() == v ? replacement : leaf;
  });
}

Expr substitute(const Expr& e, Var v, cplx value) {
  return substitute(e, v, Expr::constant(value));
}

Expr bind_parameters(const Expr& e, const ParamValues& values) {
  return transform(e, [&](const Expr& leaf) {
    if (leaf.op() != Op::parameter) return leaf;
    auto it = values.find(leaf.name());
    return it == values.end() ? leaf : Expr::constant(it->second);
  });
}

bool structurally_equal(const Expr& a, const Expr& b) {
  struct PairHash {
    std::size_t operator()(const std::pair<const void*, const void*>& p) const {
      return std::hash<const void*>()(p.first) * 31 + std::hash<const void*>()(p.second);
    }
  };
  std::unordered_set<std::pair<const void*, const void*>, PairHash> seen;
  auto go = [&](auto&& self, const Expr& l, const Expr& r) -> bool {
    if (l.id() == r.id()) return true;
    if (l.op() != r.op()) return false;
    if (seen.contains({l.id(), r.id()})) return true;
    switch (l.op()) {
      case Op::constant:
        if (l.value() != r.value()) return false;
        break;
      case Op::variable:
        if (l.var() != r.var()) return false;
        break;
      case Op::parameter:
        if (l.name() != r.name()) return false;
        break;
      case Op::int_power:
      case Op::frac_power:
        if (!(l.exponent() == r.exponent())) return false;
        break;
      default: break;
    }
    if (l.children().size() != r.children().size()) return false;
    for (std::size_t i = 0; i < l.children().size(); ++i) {
      if (!self(self, l.child(i), r.child(i))) return false;
    }
    seen.insert({l.id(), r.id()});
    return true;
  };
  return go(go, a, b);
}

namespace {

template <class Visit>
void visit_unique(const Expr& root, Visit&& visit) {
  std::unordered_set<const void*> seen;
  std::vector<Expr> stack{root};
  while (!stack.empty()) {
    Expr e = stack.back();
    stack.pop_back();
    if (!seen.insert(e.id()).second) continue;
    visit(e);
    for (const Expr& c : e.children()) stack.push_back(c);
  }
}

}  // namespace

bool depends_on(const Expr& e, Var v) {
  bool found = false;
  visit_unique(e, [&](const Expr& n) {
    if (n.op() == Op::variable && n.var() == v) found = true;
  });
  return found;
}

std::set<std::string> parameters_of(const Expr& e) {
  std::set<std::string> out;
  visit_unique(e, [&](const Expr& n) {
    if (n.op() == Op::parameter) out.insert(n.name());
  });
  return out;
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 0;
  visit_unique(e, [&](const Expr&) { ++n; });
  return n;
}

}  // namespace fuchs

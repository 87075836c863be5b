#pragma once

// Immutable expression trees over the complex numbers in the two variables
// x (spectral) and t (deformation) plus named parameters.

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fuchs {

using cplx = std::complex<double>;
using ParamValues = std::map<std::string, cplx, std::less<>>;

enum class Var : std::uint8_t { x, t };

inline const char* to_string(Var v) { return v == Var::x ? "x" : "t"; }

class ExprError : public std::runtime_error {
 public:
  enum class Kind {
    unbound_symbol,
    division_by_zero,
    log_of_zero,
    domain,
    parse,
    quadrature_nonconvergence,
  };

  ExprError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Exact rational number with a positive denominator in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);

  bool is_integer() const { return den == 1; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  /// Parses "p", "-p" or "p/q" with integer p, q.
  static Rational parse(std::string_view text);

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class Op : std::uint8_t {
  constant,
  variable,
  parameter,
  negate,
  add,
  multiply,
  divide,
  int_power,
  frac_power,
  exp,
  log,
  sqrt,
};

const char* to_string(Op op);

class Expr {
 public:
  /// The constant zero.
  Expr();
  Expr(double value);  // NOLINT(google-explicit-constructor)
  Expr(cplx value);    // NOLINT(google-explicit-constructor)
  Expr(int value) : Expr(static_cast<double>(value)) {}  // NOLINT(google-explicit-constructor)

  static Expr constant(cplx value);
  static Expr variable(Var v);
  static Expr parameter(std::string name);

  Op op() const;
  /// Only meaningful for Op::constant.
  const cplx& value() const;
  /// Only meaningful for Op::variable.
  Var var() const;
  /// Only meaningful for Op::parameter.
  const std::string& name() const;
  /// Exponent of Op::int_power (den == 1) and Op::frac_power.
  const Rational& exponent() const;
  std::span<const Expr> children() const;
  const Expr& child(std::size_t i) const { return children()[i]; }

  bool is_constant() const { return op() == Op::constant; }
  bool is_constant(cplx v) const { return is_constant() && value() == v; }
  bool is_zero() const { return is_constant(cplx{0.0, 0.0}); }
  bool is_one() const { return is_constant(cplx{1.0, 0.0}); }

  /// Address of the shared node; stable for the lifetime of the tree.
  const void* id() const { return node_.get(); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_node(Op, std::vector<Expr>, Rational);
};

Expr x();
Expr t();
Expr param(std::string name);
Expr imaginary_unit();

// Builders fold constants locally and apply 0*e -> 0, e^0 -> 1 and the
// additive/multiplicative identities. Nothing more.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, std::int64_t n);
Expr pow(const Expr& base, Rational r);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sqrt(const Expr& e);

Expr differentiate(const Expr& e, Var v);
Expr substitute(const Expr& e, Var v, const Expr& replacement);
Expr substitute(const Expr& e, Var v, cplx value);
Expr bind_parameters(const Expr& e, const ParamValues& values);

bool structurally_equal(const Expr& a, const Expr& b);
bool depends_on(const Expr& e, Var v);
std::set<std::string> parameters_of(const Expr& e);
/// Number of distinct nodes (shared subtrees counted once).
std::size_t node_count(const Expr& e);

struct Binding {
  std::optional<cplx> x;
  std::optional<cplx> t;
  ParamValues params;

  Binding() = default;
  Binding(std::optional<cplx> xv, std::optional<cplx> tv, ParamValues p = {})
      : x(xv), t(tv), params(std::move(p)) {}
};

/// Principal branches for log, sqrt and fractional powers.
cplx evaluate(const Expr& e, const Binding& b);

/// Infix grammar: x, t, I, parameter identifiers, + - * / ^, exp() log() sqrt(),
/// integer exponents and rational exponents written ^(p/q).
Expr parse(std::string_view text);
std::string to_string(const Expr& e);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_double(double v);

}  // namespace fuchs

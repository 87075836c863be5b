#include <cmath>
#include <unordered_map>

#include "fuchs/kernels.hpp"
#include "fuchs/program.hpp"

namespace fuchs {

namespace {

[[noreturn]] void unbound(const std::string& what) {
  throw ExprError(ExprError::Kind::unbound_symbol, "unbound symbol '" + what + "'");
}

[[noreturn]] void div_zero() {
  throw ExprError(ExprError::Kind::division_by_zero, "division by zero");
}

bool is_exact_zero(cplx v) { return v.real() == 0.0 && v.imag() == 0.0; }

cplx log_checked(cplx v) {
  if (is_exact_zero(v)) throw ExprError(ExprError::Kind::log_of_zero, "log of zero");
  return std::log(v);
}

cplx frac_pow(cplx base, const Rational& r) {
  if (is_exact_zero(base)) {
    if (r.num < 0) div_zero();
    return {};
  }
  return std::exp(r.value() * std::log(base));
}

// Same multiplication order as the batch path.
cplx int_pow(cplx base, std::int64_t n) {
  if (n < 0 && is_exact_zero(base)) div_zero();
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

const cplx& lookup_param(const ParamValues& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) unbound(name);
  return it->second;
}

}  // namespace

Program::Program(const Expr& root) {
  std::unordered_map<const void*, std::uint32_t> index;
  // Iterative post-order so deep trees do not exhaust the stack.
  std::vector<std::pair<Expr, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [e, expanded] = stack.back();
    stack.pop_back();
    if (index.contains(e.id())) continue;
    if (!expanded) {
      stack.emplace_back(e, true);
      for (auto it = e.children().rbegin(); it != e.children().rend(); ++it) {
        if (!index.contains(it->id())) stack.emplace_back(*it, false);
      }
      continue;
    }
    Instr in;
    in.op = e.op();
    if (!e.children().empty()) in.a = index.at(e.child(0).id());
    if (e.children().size() > 1) in.b = index.at(e.child(1).id());
    switch (e.op()) {
      case Op::constant: in.value = e.value(); break;
      case Op::variable: in.var = e.var(); break;
      case Op::parameter: in.name = e.name(); break;
      case Op::int_power:
      case Op::frac_power: in.exponent = e.exponent(); break;
      default: break;
    }
    index.emplace(e.id(), static_cast<std::uint32_t>(code_.size()));
    code_.push_back(std::move(in));
  }
}

cplx Program::operator()(const Binding& bind) const {
  std::vector<cplx> r(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Op::constant: r[i] = in.value; break;
      case Op::variable: {
        const auto& v = in.var == Var::x ? bind.x : bind.t;
        if (!v) unbound(to_string(in.var));
        r[i] = *v;
        break;
      }
      case Op::parameter: r[i] = lookup_param(bind.params, in.name); break;
      case Op::negate: r[i] = kernels::neg(r[in.a]); break;
      case Op::add: r[i] = kernels::add(r[in.a], r[in.b]); break;
      case Op::multiply: r[i] = kernels::mul(r[in.a], r[in.b]); break;
      case Op::divide:
        if (is_exact_zero(r[in.b])) div_zero();
        r[i] = kernels::div(r[in.a], r[in.b]);
        break;
      case Op::int_power: r[i] = int_pow(r[in.a], in.exponent.num); break;
      case Op::frac_power: r[i] = frac_pow(r[in.a], in.exponent); break;
      case Op::exp: r[i] = std::exp(r[in.a]); break;
      case Op::log: r[i] = log_checked(r[in.a]); break;
      case Op::sqrt: r[i] = std::sqrt(r[in.a]); break;
    }
  }
  return r.back();
}

void Program::eval(std::span<const cplx> xs, std::span<const cplx> ts, const ParamValues& params,
                   std::span<cplx> out) const {
  const std::size_t n = out.size();
  if (n == 0) return;
  std::vector<cplx> cols(code_.size() * n);
  auto col = [&](std::uint32_t k) { return std::span<cplx>(cols.data() + std::size_t{k} * n, n); };

  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    auto dst = col(static_cast<std::uint32_t>(i));
    switch (in.op) {
      case Op::constant: std::fill(dst.begin(), dst.end(), in.value); break;
      case Op::variable: {
        auto src = in.var == Var::x ? xs : ts;
        if (src.empty()) unbound(to_string(in.var));
        if (src.size() == 1) {
          std::fill(dst.begin(), dst.end(), src[0]);
        } else {
          if (src.size() != n) throw std::invalid_argument("batch column length mismatch");
          std::copy(src.begin(), src.end(), dst.begin());
        }
        break;
      }
      case Op::parameter: std::fill(dst.begin(), dst.end(), lookup_param(params, in.name)); break;
      case Op::negate: kernels::neg(col(in.a), dst); break;
      case Op::add: kernels::add(col(in.a), col(in.b), dst); break;
      case Op::multiply: kernels::mul(col(in.a), col(in.b), dst); break;
      case Op::divide:
        for (const cplx& v : col(in.b)) {
          if (is_exact_zero(v)) div_zero();
        }
        kernels::div(col(in.a), col(in.b), dst);
        break;
      case Op::int_power: {
        const std::int64_t e = in.exponent.num;
        auto base = col(in.a);
        if (e < 0) {
          for (const cplx& v : base) {
            if (is_exact_zero(v)) div_zero();
          }
        }
        std::uint64_t k = e < 0 ? static_cast<std::uint64_t>(-(e + 1)) + 1 : static_cast<std::uint64_t>(e);
        std::vector<cplx> sq(base.begin(), base.end());
        bool first = true;
        while (k != 0) {
          if (k & 1U) {
            if (first) {
              std::copy(sq.begin(), sq.end(), dst.begin());
            } else {
              kernels::mul(dst, sq, dst);
            }
            first = false;
          }
          k >>= 1U;
          if (k != 0) kernels::mul(sq, sq, sq);
        }
        if (first) std::fill(dst.begin(), dst.end(), cplx{1.0, 0.0});
        if (e < 0) {
          std::vector<cplx> ones(n, cplx{1.0, 0.0});
          kernels::div(ones, dst, dst);
        }
        break;
      }
      case Op::frac_power: {
        auto src = col(in.a);
        for (std::size_t j = 0; j < n; ++j) dst[j] = frac_pow(src[j], in.exponent);
        break;
      }
      case Op::exp: {
        auto src = col(in.a);
        for (std::size_t j = 0; j < n; ++j) dst[j] = std::exp(src[j]);
        break;
      }
      case Op::log: {
        auto src = col(in.a);
        for (std::size_t j = 0; j < n; ++j) dst[j] = log_checked(src[j]);
        break;
      }
      case Op::sqrt: {
        auto src = col(in.a);
        for (std::size_t j = 0; j < n; ++j) dst[j] = std::sqrt(src[j]);
        break;
      }
    }
  }
  auto last = col(static_cast<std::uint32_t>(code_.size() - 1));
  std::copy(last.begin(), last.end(), out.begin());
}

cplx evaluate(const Expr& e, const Binding& b) { return Program(e)(b); }

}  // namespace fuchs

#pragma once

// Flattened form of an Expr for repeated evaluation. Shared subtrees are
// evaluated once. The batch path runs the arithmetic through the column
// kernels and gives bit-identical results to the pointwise path.

#include <span>
#include <vector>

#include "fuchs/expr.hpp"

namespace fuchs {

class Program {
 public:
  explicit Program(const Expr& e);

  cplx operator()(const Binding& b) const;

  // Each of xs, ts is empty (unbound), length 1 (broadcast) or out.size().
  void eval(std::span<const cplx> xs, std::span<const cplx> ts, const ParamValues& params,
            std::span<cplx> out) const;

  std::size_t size() const { return code_.size(); }

 private:
  struct Instr {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    cplx value{};
    Var var = Var::x;
    std::string name;
    Rational exponent;
  };
  std::vector<Instr> code_;
};

}  // namespace fuchs

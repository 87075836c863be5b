#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "fuchs/expr.hpp"

namespace fuchs {

/// Axis-aligned rectangle in the complex plane.
struct Box {
  cplx lo;
  cplx hi;

  bool contains(cplx z) const {
    return z.real() >= lo.real() && z.real() <= hi.real() && z.imag() >= lo.imag() && z.imag() <= hi.imag();
  }
  /// Point at fractional coordinates (u, v) in [0,1]^2.
  cplx at(double u, double v) const {
    return {lo.real() + u * (hi.real() - lo.real()), lo.imag() + v * (hi.imag() - lo.imag())};
  }
};

/// Deterministic generator: uniforms are built from raw 64-bit output so the
/// stream does not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  Rng(std::uint64_t seed, std::string_view stream) : gen_(seed ^ fnv1a(stream)) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  cplx in(const Box& box) {
    const double u = uniform();
    const double v = uniform();
    return box.at(u, v);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    return h;
  }

 private:
  std::mt19937_64 gen_;
};

/// True iff max |e| over the probes <= tol * (1 + scale), where scale is the
/// max |reference| over the same probes (1 without a reference).
bool numerically_zero(const Expr& e, std::span<const Binding> probes, double tol,
                      const Expr* reference = nullptr);

/// Max |e| over the probes.
double max_abs(const Expr& e, std::span<const Binding> probes);

}  // namespace fuchs

#pragma once

// Decomposition of a scalar pair into (g, P1, P2, P3, f, h, R, M), the new
// variable tau = t E(x) + S(x) with E = exp(int h), S = int f E, the gauge
// factor and the coefficients of the reduced equation w'' + P w' + Q w = 0.

#include <optional>
#include <span>
#include <vector>

#include "fuchs/catalog.hpp"
#include "fuchs/numeric.hpp"
#include "fuchs/program.hpp"
#include "fuchs/quadrature.hpp"
#include "fuchs/system.hpp"

namespace fuchs {

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where an entry is probed: basepoint, boxes, random probe points off the
/// singular sets, and the t-independent singular x points paths avoid.
struct ProbeRegion {
  cplx basepoint_x;
  Box x_box;
  Box t_box;
  std::vector<Binding> probes;
  std::vector<cplx> avoid_x;
};

struct RegionOverrides {
  std::optional<cplx> basepoint_x;
  std::optional<Box> x_box;
  std::optional<Box> t_box;
};

/// `count` probes drawn from the stream "probes/<id>" of the seed, at least
/// 0.05 away from every singular point.
ProbeRegion probe_region(const Instance& inst, std::uint64_t seed, std::size_t count = 12,
                         const RegionOverrides& overrides = {});

enum class CaseTag { generic_EQ, EQ1, EQ2, EQ3, mixed };
const char* to_string(CaseTag c);

struct Decomposition {
  Expr g_of_t;      ///< b12(x0, t); 1 for direct pairs
  Expr P1, P2, P3;  ///< a12 = g (P1 + t P2), b12 = g P3; direct pairs use P1 = f, P2 = h, P3 = 1
  Expr f, h;
  /// R and M follow the sign of the displayed split of each component: for
  /// the second component they are the negatives of the split of q2.
  Expr R, M;
  std::optional<cplx> exponent_A;
  cplx constant_B{1.0, 0.0};
  bool f_zero = false;
  bool h_zero = false;
  bool M_zero = false;
  bool M_constant = false;
  Component component = Component::first;
  bool direct = false;

  /// Max relative residual of the invariants over the probes and the third
  /// t sample.
  double residual = 0.0;
  /// Max |M + g'/(2g)| over the probes; set for Lax pairs in the generic case.
  std::optional<double> M_vs_g;

  /// Coefficient entering the gauge exp(int R_eff) and the reduced equation.
  Expr R_eff() const { return component == Component::first ? R : -R; }
};

Decomposition decompose(const ScalarPair& sp, const ProbeRegion& region);

CaseTag classify_case(const Decomposition& dec);

struct Coefficients {
  cplx P;
  cplx Q;
};

/// tau_framed = c tau + d maps the basepoint-normalized variable onto a stored
/// closed form. The identity when uncalibrated.
struct Frame {
  cplx c{1.0, 0.0};
  cplx d{0.0, 0.0};
  bool calibrated = false;
  double residual = 0.0;  ///< relative mismatch at the validation points

  cplx tau(cplx raw) const { return c * raw + d; }
  Coefficients coefficients(Coefficients raw) const { return {raw.P / c, raw.Q / (c * c)}; }
};

class ReducedEquation {
 public:
  ReducedEquation(const ScalarPair& sp, const Decomposition& dec, cplx basepoint_x, std::vector<cplx> avoid_x);

  CaseTag case_tag() const { return case_; }
  cplx basepoint_x() const { return x0_; }
  const Decomposition& decomposition() const { return dec_; }

  /// exp(int_{x0}^{x} h).
  cplx E(cplx x) const;
  /// int_{x0}^{x} f E.
  cplx S(cplx x) const;
  cplx tau_at(cplx x, cplx t) const { return t * E(x) + S(x); }
  /// exp(int_{x0}^{x} R_eff).
  cplx gauge_at(cplx x) const;
  /// d tau/dx and d^2 tau/dx^2 given E(x).
  std::pair<cplx, cplx> tau_derivatives(cplx x, cplx t, cplx Ex) const;
  /// Raw-frame P and Q; throws ReductionError where d tau/dx vanishes.
  Coefficients coefficients_at(cplx x, cplx t) const;
  Coefficients coefficients_at(cplx x, cplx t, cplx Ex) const;

  /// Fits (c, d) against the closed form at two points and validates at two
  /// more to 1e-9; leaves the identity frame when the closed form disagrees.
  void calibrate(const Expr& tau_closed, const Box& x_box, const Box& t_box);
  const Frame& frame() const { return frame_; }

  cplx tau_framed(cplx x, cplx t) const { return frame_.tau(tau_at(x, t)); }
  Coefficients framed_coefficients_at(cplx x, cplx t) const { return frame_.coefficients(coefficients_at(x, t)); }

 private:
  Path path_to(cplx x) const;

  Decomposition dec_;
  CaseTag case_;
  cplx x0_;
  std::vector<cplx> avoid_;
  Program f_, h_, df_, dh_, p1_, q1_, R_, dR_;
  Frame frame_;
};

/// tau at (x, t) for the given basepoint.
cplx tau_map(const Decomposition& dec, cplx x, cplx t, cplx basepoint_x, std::span<const cplx> avoid_x = {});
/// exp(int_{x0}^{x} R_eff): exp(+int R) for the first component, exp(-int R)
/// for the second.
cplx gauge(const Decomposition& dec, cplx x, cplx basepoint_x, std::span<const cplx> avoid_x = {});
Coefficients reduced_coefficients(const ReducedEquation& red, cplx x, cplx t);

}  // namespace fuchs

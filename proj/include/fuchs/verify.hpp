#pragma once

// Numerical certification of a reduction: t-independence of the reduced
// coefficients, identification of the classical target, and a check of the
// reduced equation on numeric solutions of the linear system.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fuchs/catalog.hpp"
#include "fuchs/ode.hpp"
#include "fuchs/reduction.hpp"

namespace fuchs {

class VerifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters by kind: airy "scale" (tau = scale xi); whittaker "kappa",
/// "mu2"; constant "c" (Q = -c); linear_potential "a", "b" (Q = -(a + b tau)).
struct ClassicalTarget {
  TargetKind kind = TargetKind::none;
  std::map<std::string, cplx> params;
};

struct Tolerances {
  double frobenius = 1e-10;
  double flow = 1e-10;
  double decomposition = 1e-9;
  double scalar = 1e-7;
  double first_integral = 1e-7;
  double independence = 1e-8;
  double match = 1e-8;
  double crossval = 1e-6;
};

struct Config {
  Tolerances tol;
  std::uint64_t seed = 42;
  std::size_t n_pairs = 32;
  std::size_t grid = 5;              ///< Frobenius grid is grid x grid
  std::size_t flow_points = 16;
  std::size_t probes = 16;           ///< decomposition and first-integral probes
  std::size_t crossval_points = 256;
  ParamOverrides params;
  RegionOverrides region;
};

/// Everything derived from one catalog entry up to the reduced equation.
struct Pipeline {
  Instance inst;
  ProbeRegion region;
  ScalarPair sp;
  Decomposition dec;
  std::optional<ReducedEquation> red;

  const std::string& id() const { return inst.entry->id; }
  /// tau and the coefficients in the calibrated frame (raw when uncalibrated).
  cplx tau(cplx x, cplx t) const { return red->tau_framed(x, t); }
};

/// Throws CatalogError, ScalarizeError or ReductionError.
Pipeline build_pipeline(std::string_view id, const Config& cfg = {});

struct Sample {
  cplx x, t, tau, P, Q;
};

struct Independence {
  double max_deviation = 0.0;
  std::vector<Sample> samples;  ///< both points of every pair
};

/// Deviation floor: differences below a few ulps cannot be certified.
constexpr double kDeviationFloor = 16.0 * 2.220446049250313e-16;

/// Coefficients at (x, t) in the pipeline's frame.
Sample sample_at(const Pipeline& pl, cplx x, cplx t);
/// (|dP| + |dQ|) / max(1, |P| + |Q|) plus the floor.
double deviation(const Sample& a, const Sample& b);

/// n_pairs pairs with equal tau, x points at least 0.1 apart.
Independence check_t_independence(const Pipeline& pl, std::size_t n_pairs, std::uint64_t seed);

struct Match {
  ClassicalTarget target;
  double residual = 0.0;
  /// P = p0 + p1/tau; -Q_v = c[0] + c[1] tau + c[2]/tau + c[3]/tau^2 where
  /// Q_v = Q - P^2/4 - P'/2 is the coefficient after removing P.
  cplx p0, p1;
  std::array<cplx, 4> c{};

  cplx P(cplx tau) const { return p0 + p1 / tau; }
  cplx Q(cplx tau) const;
};

/// Needs at least 8 samples with distinct tau; throws VerifyError otherwise.
Match match_classical(const std::vector<Sample>& samples);

/// Relative disagreement of the matched target with the expected one;
/// infinity when the kinds differ.
double target_error(const ClassicalTarget& got, const ClassicalTarget& want);
/// The entry's expected target with its parameters evaluated.
ClassicalTarget expected_target(const Instance& inst);

/// Phi(x, t_fixed) along the path for a Lax pair, or (phi, phi') for a
/// direct scalar pair.
DenseTrace solve_linear_system(const Pipeline& pl, cplx t_fixed, const Path& x_path, const Vec2& initial,
                               const OdeOptions& opt = {}, std::span<const double> land_on = {});

struct CrossValidation {
  double residual = 0.0;   ///< max |w'' + P w' + Q w| / max |w|
  std::size_t points = 0;  ///< stencil centers checked
};

/// Solves from (x0, t_fixed) with Phi = (1, 1/2), samples w = phi/gauge at
/// `nodes` equally spaced x in [x_lo, x_hi] and checks the reduced equation by
/// 5-point differences. Uses the matched model when given, else P and Q.
CrossValidation cross_validate(const Pipeline& pl, const Match* model, cplx t_fixed = 1.0, double x_lo = 1.6,
                               double x_hi = 2.5, std::size_t nodes = 256);

/// Max |tau_x - (f + t h) tau_t| over the probes, derivatives of tau_at by
/// central differences.
double first_integral_residual(const Pipeline& pl, std::span<const Binding> probes);

/// Fits tau' = c tau + d for basepoint x1 against the pipeline basepoint from
/// three points and returns the relative miss at a fourth.
double basepoint_covariance(const Pipeline& pl, cplx other_basepoint);

struct VerificationReport {
  std::string id;
  bool passed = false;
  Tolerances tol;
  std::optional<double> frobenius_max;
  double flow_max = 0.0;
  std::optional<double> scalar_residual_max;
  std::optional<double> decomposition_residual;
  std::optional<double> expected_decomposition_error;
  std::optional<CaseTag> case_tag;
  std::optional<cplx> exponent_A;
  std::optional<Frame> frame;
  std::optional<double> first_integral_max;
  std::optional<double> t_independence_max;
  std::optional<Match> match;
  std::optional<double> target_error;
  std::optional<double> cross_validation_residual;
  std::vector<std::string> errors;  ///< "stage: message" for failed stages
};

/// Never throws; stage failures land in `errors` and clear `passed`.
VerificationReport full_report(std::string_view id, const Config& cfg = {});

}  // namespace fuchs

#pragma once

// Registry of Lax pairs specialized at algebraic Painleve solutions.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fuchs/expr.hpp"
#include "fuchs/numeric.hpp"
#include "fuchs/system.hpp"

namespace fuchs {

enum class Family { PII, PIII, PIV, PV, PV_Kitaev };
const char* to_string(Family f);

enum class TargetKind { airy, whittaker, constant, linear_potential, none };
const char* to_string(TargetKind k);
std::optional<TargetKind> target_kind_from_string(std::string_view s);

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedExpr {
  std::string name;
  std::string text;  ///< in the expression grammar; may use the entry parameters
};

/// Expected classical target, parameters written as expressions in the entry
/// parameters. Keys: airy "scale"; whittaker "kappa", "mu2"; constant "c";
/// linear_potential "a", "b".
struct ExpectedTarget {
  TargetKind kind = TargetKind::none;
  std::vector<NamedExpr> params;
};

struct ExpectedDecomposition {
  std::string f, h, R, M;
};

struct Variant {
  std::string description;
  std::vector<NamedExpr> params;
  std::vector<NamedExpr> closed_forms;
};

struct CatalogEntry {
  std::string id;
  Family family = Family::PII;
  std::string solution;
  bool negative = false;

  std::map<std::string, Rational> free_params;  ///< overridable
  std::vector<NamedExpr> fixed_params;          ///< in terms of the free ones
  std::vector<NamedExpr> closed_forms;          ///< y, z, u, w, ... in t
  std::vector<Variant> variants;                ///< alternatives sharing one scalar pair

  Component component = Component::first;
  std::string pre_substitution = "identity";
  bool direct_scalar_pair = false;

  cplx basepoint_x{1.0, 0.0};
  Box x_box{{1.1, -0.2}, {2.5, 0.2}};
  Box t_box{{0.5, -0.2}, {1.5, 0.2}};
  std::vector<std::string> singular_x;  ///< may depend on t
  std::vector<std::string> singular_t;

  std::string tau_closed;    ///< closed form of the new variable, if known
  std::string gauge_closed;  ///< closed form of exp(+-int R), if known
  std::optional<ExpectedDecomposition> expected_decomposition;
  ExpectedTarget expected_target;

  /// Throws CatalogError when parameter values are degenerate for the entry.
  std::function<void(const ParamValues&)> validate;
};

/// Numeric instance: all parameters and closed forms substituted.
struct Instance {
  const CatalogEntry* entry = nullptr;
  ParamValues params;  ///< free and fixed parameter values
  std::optional<LaxPair> lax;
  std::optional<ScalarPair> direct;
  std::vector<Expr> flows;  ///< residual expressions in t
  std::vector<Expr> singular_x;
  std::vector<Expr> singular_t;

  /// Expression from the entry's text with the parameters bound.
  Expr bind(const std::string& text) const;
  /// Singular x points at the given t.
  std::vector<cplx> singular_x_at(cplx t) const;
  bool near_singular(cplx x, cplx t, double clearance) const;
};

/// The eight positive entries, in a fixed order.
const std::vector<std::string>& list_entries();
/// Positive entries followed by negative controls.
const std::vector<std::string>& list_all_entries();
const CatalogEntry& lookup(std::string_view id);

using ParamOverrides = std::map<std::string, Rational>;

/// variant 0 is the stored Lax pair; 1.. select entry.variants[i-1].
Instance instantiate(std::string_view id, const ParamOverrides& overrides = {}, std::size_t variant = 0);

/// Max over the flow residual expressions of |value| at t.
double flow_residual(const Instance& inst, cplx t);

}  // namespace fuchs

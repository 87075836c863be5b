#pragma once

#include <vector>

#include "fuchs/system.hpp"

namespace fuchs::families {

// Each closed form is an Expr in t; parameters are Exprs (usually constants).

LaxPair lax_PII(const Expr& y, const Expr& z, const Expr& u, const Expr& theta);
std::vector<Expr> flows_PII(const Expr& y, const Expr& z, const Expr& u, const Expr& theta);

LaxPair lax_PIII(const Expr& y, const Expr& z, const Expr& w, const Expr& theta_inf, const Expr& theta_0);
std::vector<Expr> flows_PIII(const Expr& y, const Expr& z, const Expr& w, const Expr& theta_inf,
                             const Expr& theta_0);

LaxPair lax_PIV(const Expr& y, const Expr& z, const Expr& u, const Expr& theta_0, const Expr& theta_inf);
std::vector<Expr> flows_PIV(const Expr& y, const Expr& z, const Expr& u, const Expr& theta_0,
                            const Expr& theta_inf);

LaxPair lax_PV(const Expr& y, const Expr& z, const Expr& u, const Expr& theta_0, const Expr& theta_1,
               const Expr& theta_inf);
std::vector<Expr> flows_PV(const Expr& y, const Expr& z, const Expr& u, const Expr& theta_0,
                           const Expr& theta_1, const Expr& theta_inf);

// Degenerate P_V linearization reduced to a scalar pair in z, where the
// original deformation variable is z^2.
ScalarPair scalar_pair_kitaev(const Expr& kappa, const Expr& mu);
std::vector<Expr> flows_kitaev(const Expr& kappa, const Expr& mu);

}  // namespace fuchs::families

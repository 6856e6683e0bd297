#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "perpetua/ldm.hpp"

namespace perpetua {

/// A local dependence measure as a callable, with the metadata the transform
/// machinery needs: the regular-variation index, ess sup A (bounds the search
/// range, since g vanishes beyond 1/a_plus), and g(0+).
struct LdmFunction {
    std::function<double(double)> g;
    double rho = 1.0;
    double a_plus = 1.0;
    double gamma0 = 0.0;     // g(0+), possibly +inf
    double y_max_hint = 0.0; // extend the phi search range when the curve reaches further
};

LdmFunction pqd_ldm(double gamma, double a_plus, double rho);
/// Direct per-evaluation minimization; exact but ~2000x costlier per call than
/// a curve. Use curve_ldm(make_example8_curve(...)) for dense lambda sweeps.
LdmFunction example8_ldm(const AlphaFn& alpha, double rho);
LdmFunction curve_ldm(LDMCurve curve);

struct PhiResult {
    double value = 0.0;
    double argmin_y = 0.0;
};

/// Legendre-type transform phi_rho(lambda) = inf_{y>0} { y^rho lambda + g(y) }.
/// Searched on (0, Y_max], Y_max = max(2/a_plus, y_max_hint): g vanishes beyond
/// 1/a_plus, so the infimum over (0, inf) is attained on the bounded range.
/// A y -> 0+ boundary candidate covers infima approached at the origin.
PhiResult phi(const LdmFunction& ldm, double lambda);

/// PQD closed form:
///   rho > 1:   (gamma^{1/(1-rho)} + a_plus^{rho/(rho-1)} lambda^{1/(1-rho)})^{1-rho}
///   rho <= 1:  min{gamma, lambda a_plus^{-rho}}
/// with the lambda = 0 limit equal to 0.
double phi_pqd_closed(double gamma, double a_plus, double rho, double lambda);

struct LambdaStarResult {
    double value = 0.0;  // +inf iff g(0) = +inf
    double argmin_y = 0.0;
};

/// lambda* = inf_{y in (0,1)} g(y) / (1 - y^rho).
LambdaStarResult lambda_star(const LdmFunction& ldm);

/// PQD closed form: gamma (1 - a_plus^{rho/(rho-1)})^{rho-1} for rho > 1, gamma otherwise.
double lambda_star_pqd_closed(double gamma, double a_plus, double rho);

struct AdmissibilityResult {
    bool admissible = false;
    std::optional<double> witness_lambda;  // lambda with phi(lambda) > lambda, if that branch
};

/// g is admissible iff some lambda > 0 has phi(lambda) > lambda, or g(0) = 0.
/// The witness search walks a log grid lambda in [1e-6, 1e6] and demands a
/// margin of 1e-9 (1 + lambda) so optimizer bias cannot manufacture a witness.
AdmissibilityResult admissibility(const LdmFunction& ldm);

struct FixedPointReport {
    double lambda_star = 0.0;
    double lambda_star_argmin = 0.0;
    double residual = 0.0;       // |phi(lambda*) - lambda*|
    bool residual_ok = false;
    bool below_ok = false;       // phi(c) >= c on a 20-point grid in (0, lambda*)
    bool above_ok = false;       // phi(c) < c on a 20-point grid in (lambda*, 2 lambda*]
    double worst_below_gap = 0.0;  // min over the grid of phi(c) - c
    double worst_above_gap = 0.0;  // max over the grid of phi(c) - c
    double worst_below_c = 0.0;
    double worst_above_c = 0.0;
    bool ok() const { return residual_ok && below_ok && above_ok; }
};

/// Verifies phi(lambda*) = lambda* within tol and the fixed-point ordering
/// phi(c) >= c below lambda*, phi(c) < c above. Requires lambda* finite.
FixedPointReport fixed_point_check(const LdmFunction& ldm, double tol = 1e-6);

struct TransformReport {
    std::vector<double> lambda_grid;
    std::vector<double> phi_values;
    std::vector<double> argmin_y;
    double lambda_star = 0.0;
    double lambda_star_argmin = 0.0;
    bool admissible = false;
    double fixed_point_residual = 0.0;  // valid when lambda* finite
};

TransformReport transform_report(const LdmFunction& ldm, std::span<const double> lambda_grid);

/// Shape check for a computed phi sequence: nondecreasing and concave along an
/// increasing lambda grid, within tol. Returns the worst violation (<= 0 means clean).
double phi_shape_violation(std::span<const double> lambda_grid,
                           std::span<const double> phi_values);

}  // namespace perpetua

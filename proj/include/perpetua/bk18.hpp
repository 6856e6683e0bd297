#pragma once

#include "perpetua/models.hpp"

namespace perpetua {

struct HResult {
    double value = 0.0;
    double argmin_s = 1.0;
};

/// Prior-work tail functional for the atom-survival family:
/// h(t) = t^rho inf_{s in [1,t]} s^{1-rho} alpha(1 - 1/s), minimized in log s.
/// Requires t > 1.
HResult h_function(const AlphaFn& alpha, double rho, double t);

/// Displayed lower-bound constant [s(1 - (1 - 1/s)^{rho/(rho-1)})]^{rho-1},
/// rho > 1, s >= 1.
double bk18_bound_constant(double rho, double s);

enum class ExampleCase { a, b };
enum class ComparisonVerdict { equal, strict_gap };

struct ComparisonReport {
    double rho = 0.0;
    ExampleCase case_tag = ExampleCase::a;
    double lambda_star = 0.0;          // from the Legendre machinery on the family's LDM
    double lambda_star_argmin_y = 0.0;
    double bk18_value = 0.0;           // lower-bound constant in h(t)/t^rho normalization
    double h_over_trho = 0.0;
    double argmin_s = 1.0;
    double gap = 0.0;                  // bk18_value - lambda_star (>= 0 up to tolerance)
    ComparisonVerdict verdict = ComparisonVerdict::equal;
};

/// Case (a): alpha(a) = (1-a)^{1-rho}, rho > 1 -- the bound constant optimized
/// over s equals lambda* exactly (substitution s = 1/(1-a)).
/// Case (b): alpha(a) = exp(a/(1-a)), rho > 2 -- the bound is evaluated at the
/// h-minimizing s = rho - 1 and sits strictly above lambda*.
ComparisonReport compare_case(ExampleCase which, double rho);

}  // namespace perpetua

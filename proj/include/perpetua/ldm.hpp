#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perpetua/minimize.hpp"
#include "perpetua/models.hpp"
#include "perpetua/regvar.hpp"

namespace perpetua {

enum class LdmSource { pqd_closed, example8_closed, finite_t_estimate };

/// Local dependence measure g on a y-grid. Values are extended reals (+inf
/// allowed). Structural invariants -- nonincreasing, zero above 1/a_plus, above
/// the g(0)(1 - a_plus y)^rho floor -- are asserted at construction, tightly
/// for closed-form sources and with a caller-visible slack for finite-t
/// estimates (which carry quadrature or Monte Carlo bias).
struct LDMCurve {
    std::vector<double> y_grid;
    std::vector<double> values;
    LdmSource source = LdmSource::pqd_closed;
    double rho = 1.0;
    double gamma0 = 0.0;  // g(0), possibly +inf
    double a_plus = 1.0;

    /// Piecewise-linear evaluation, flat extension on both sides. A cell with
    /// an infinite left endpoint evaluates to +inf (g is nonincreasing, so this
    /// is the conservative reading of a step).
    double operator()(double y) const;

    void validate(double slack) const;
};

/// PQD closed form g(y) = gamma * max(1 - a_plus y, 0)^rho. Requires finite gamma.
double ldm_pqd(double gamma, double a_plus, double rho, double y);

/// Atom-survival family: g(y) = inf_{a in [0,1)} (1 - y a)^rho alpha(a) for
/// y <= 1, and 0 for y > 1. Dense 2048-point pre-scan plus golden-section
/// refinement, minimized in log space.
double ldm_example8(const AlphaFn& alpha, double rho, double y);
/// Same minimization, exposing the minimizing a.
MinResult ldm_example8_inf(const AlphaFn& alpha, double rho, double y);

LDMCurve make_pqd_curve(double gamma, double a_plus, double rho,
                        std::span<const double> y_grid);
LDMCurve make_example8_curve(const AlphaFn& alpha, double rho, std::size_t n_points = 4001);

enum class LdmMode { quadrature, monte_carlo };

struct LdmEstimateRow {
    double y = 0.0;
    double t = 0.0;
    double prob = 0.0;      // may underflow to 0; log_prob stays exact
    double log_prob = 0.0;
    double ratio = 0.0;     // -log prob / f(t)
    bool floor_hit = false;
};

struct LdmEstimate {
    std::vector<LdmEstimateRow> rows;
    double estimate = 0.0;  // ratio at the largest t above the resolvability floor
    bool infinite = false;  // MC saw zero hits at every t: g(y) possibly +inf
    double floor = 0.0;
    LdmMode mode = LdmMode::quadrature;
};

/// Finite-t LDM estimate r(t) = -log P(A t y + B > t) / f(t) on a t-grid.
/// Quadrature mode is exact per t (floor 1e-300 on the reported probability);
/// Monte Carlo mode uses n_samples draws per grid entry with one generator
/// stream per entry (floor 10/n). The headline estimate is r at the largest
/// resolvable t; the per-t rows document the finite-t bias instead of hiding it.
LdmEstimate ldm_estimate(const PairModel& model, const RegVarFn& f, double y,
                         std::span<const double> t_grid, LdmMode mode,
                         std::uint64_t n_samples = 0, std::uint64_t seed = 0,
                         int workers = 0);

/// Curve built from per-y estimates (headline values).
LDMCurve make_estimate_curve(const PairModel& model, const RegVarFn& f,
                             std::span<const double> y_grid,
                             std::span<const double> t_grid, LdmMode mode,
                             std::uint64_t n_samples = 0, std::uint64_t seed = 0,
                             int workers = 0, double slack = 0.1);

}  // namespace perpetua

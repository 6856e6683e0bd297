#include "perpetua/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "perpetua/grid.hpp"

namespace perpetua {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Boundary candidate standing in for y -> 0+: y^rho lambda is below double
// resolution there for every lambda and rho in range, so the objective value
// collapses to g(0+).
constexpr double kOriginY = 1e-280;
}  // namespace

LdmFunction pqd_ldm(double gamma, double a_plus, double rho) {
    LdmFunction f;
    f.g = [gamma, a_plus, rho](double y) { return ldm_pqd(gamma, a_plus, rho, y); };
    f.rho = rho;
    f.a_plus = a_plus;
    f.gamma0 = gamma;
    return f;
}

LdmFunction example8_ldm(const AlphaFn& alpha, double rho) {
    LdmFunction f;
    f.g = [alpha, rho](double y) { return ldm_example8(alpha, rho, y); };
    f.rho = rho;
    f.a_plus = alpha.domain_sup();
    f.gamma0 = 1.0;  // alpha(0)
    return f;
}

LdmFunction curve_ldm(LDMCurve curve) {
    LdmFunction f;
    f.rho = curve.rho;
    f.a_plus = curve.a_plus;
    f.gamma0 = curve.gamma0;
    f.y_max_hint = curve.y_grid.back();
    auto shared = std::make_shared<LDMCurve>(std::move(curve));
    f.g = [shared](double y) { return (*shared)(y); };
    return f;
}

PhiResult phi(const LdmFunction& ldm, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("phi: lambda must be >= 0");
    const double y_max =
        std::max(ldm.a_plus > 0.0 ? 2.0 / ldm.a_plus : 2.0, ldm.y_max_hint);
    auto objective = [&](double y) { return lambda * std::pow(y, ldm.rho) + ldm.g(y); };

    MinResult best = minimize_on_grid(objective, logspace(1e-12, y_max, 4096));
    const double origin = objective(kOriginY);
    if (origin < best.value) best = {kOriginY, origin};
    return {best.value, best.x};
}

double phi_pqd_closed(double gamma, double a_plus, double rho, double lambda) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("phi_pqd_closed: gamma must be finite and >= 0");
    if (!(a_plus > 0.0 && a_plus <= 1.0))
        throw std::invalid_argument("phi_pqd_closed: a_plus must be in (0,1]");
    if (!(lambda >= 0.0)) throw std::invalid_argument("phi_pqd_closed: lambda must be >= 0");
    if (lambda == 0.0 || gamma == 0.0) return 0.0;
    if (rho > 1.0) {
        const double inv = 1.0 / (1.0 - rho);
        return std::pow(std::pow(gamma, inv) +
                            std::pow(a_plus, rho / (rho - 1.0)) * std::pow(lambda, inv),
                        1.0 - rho);
    }
    return std::min(gamma, lambda * std::pow(a_plus, -rho));
}

LambdaStarResult lambda_star(const LdmFunction& ldm) {
    const double rho = ldm.rho;
    // 1 - y^rho via expm1 keeps the denominator exact as y -> 1-.
    auto objective = [&](double y) {
        const double denom = -std::expm1(rho * std::log(y));
        const double gy = ldm.g(y);
        if (denom <= 0.0) return kInf;
        return gy / denom;
    };
    // Grid dense near both endpoints: the infimum sits at y -> 0+ for rho <= 1
    // and can sit at y -> 1- when a_plus = 1.
    std::vector<double> grid = logspace(1e-12, 0.5, 2048);
    {
        const std::vector<double> ups = logspace(1e-14, 0.5, 2048);
        for (std::size_t i = ups.size(); i-- > 1;) grid.push_back(1.0 - ups[i - 1]);
    }
    MinResult best = minimize_on_grid(objective, grid);
    for (double y : {kOriginY, 1.0 - 1e-14}) {
        const double v = objective(y);
        if (v < best.value) best = {y, v};
    }
    return {best.value, best.x};
}

double lambda_star_pqd_closed(double gamma, double a_plus, double rho) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("lambda_star_pqd_closed: gamma must be finite and >= 0");
    if (!(a_plus > 0.0 && a_plus <= 1.0))
        throw std::invalid_argument("lambda_star_pqd_closed: a_plus must be in (0,1]");
    if (rho > 1.0)
        return gamma * std::pow(1.0 - std::pow(a_plus, rho / (rho - 1.0)), rho - 1.0);
    return gamma;
}

AdmissibilityResult admissibility(const LdmFunction& ldm) {
    for (double lambda : logspace(1e-6, 1e6, 121)) {
        const PhiResult p = phi(ldm, lambda);
        if (p.value > lambda + 1e-9 * (1.0 + lambda)) return {true, lambda};
    }
    if (ldm.g(kOriginY) <= 1e-12) return {true, std::nullopt};  // g(0) = 0 branch
    return {false, std::nullopt};
}

FixedPointReport fixed_point_check(const LdmFunction& ldm, double tol) {
    const LambdaStarResult ls = lambda_star(ldm);
    if (!std::isfinite(ls.value))
        throw std::invalid_argument("fixed_point_check: lambda* must be finite");
    FixedPointReport report;
    report.lambda_star = ls.value;
    report.lambda_star_argmin = ls.argmin_y;
    report.residual = std::abs(phi(ldm, ls.value).value - ls.value);
    report.residual_ok = report.residual <= tol;
    report.below_ok = report.above_ok = true;
    report.worst_below_gap = kInf;
    report.worst_above_gap = -kInf;
    if (ls.value == 0.0) {  // lambda* = 0: both grids are empty, trivially consistent
        report.worst_below_gap = 0.0;
        report.worst_above_gap = 0.0;
        return report;
    }
    for (int k = 1; k <= 20; ++k) {
        const double c = ls.value * static_cast<double>(k) / 21.0;
        const double gap = phi(ldm, c).value - c;
        if (gap < report.worst_below_gap) {
            report.worst_below_gap = gap;
            report.worst_below_c = c;
        }
        if (gap < -tol) report.below_ok = false;
    }
    for (int k = 1; k <= 20; ++k) {
        const double c = ls.value * (1.0 + static_cast<double>(k) / 20.0);
        const double gap = phi(ldm, c).value - c;
        if (gap > report.worst_above_gap) {
            report.worst_above_gap = gap;
            report.worst_above_c = c;
        }
        if (gap >= tol) report.above_ok = false;
    }
    return report;
}

TransformReport transform_report(const LdmFunction& ldm, std::span<const double> lambda_grid) {
    TransformReport report;
    report.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
    report.phi_values.reserve(lambda_grid.size());
    report.argmin_y.reserve(lambda_grid.size());
    for (double lambda : lambda_grid) {
        const PhiResult p = phi(ldm, lambda);
        report.phi_values.push_back(p.value);
        report.argmin_y.push_back(p.argmin_y);
    }
    const LambdaStarResult ls = lambda_star(ldm);
    report.lambda_star = ls.value;
    report.lambda_star_argmin = ls.argmin_y;
    report.admissible = admissibility(ldm).admissible;
    if (std::isfinite(ls.value))
        report.fixed_point_residual = std::abs(phi(ldm, ls.value).value - ls.value);
    return report;
}

double phi_shape_violation(std::span<const double> lambda_grid,
                           std::span<const double> phi_values) {
    double worst = -kInf;
    const std::size_t n = lambda_grid.size();
    for (std::size_t i = 1; i < n; ++i)
        worst = std::max(worst, phi_values[i - 1] - phi_values[i]);  // must be nondecreasing
    for (std::size_t i = 1; i + 1 < n; ++i) {
        // concavity: the chord through neighbors must not exceed the middle value
        const double l = lambda_grid[i - 1], m = lambda_grid[i], r = lambda_grid[i + 1];
        const double w = (m - l) / (r - l);
        const double chord = (1.0 - w) * phi_values[i - 1] + w * phi_values[i + 1];
        worst = std::max(worst, chord - phi_values[i]);
    }
    return worst;
}

}  // namespace perpetua

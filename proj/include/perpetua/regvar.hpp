#pragma once

#include <span>
#include <utility>
#include <vector>

namespace perpetua {

/// Regularly varying scale function of index rho > 0 from the power-log family
///
///   f(t) = scale * t^rho * (1 + log t)^log_exponent   for t >= max(domain_floor, 1),
///
/// extended linearly and continuously on [0, max(domain_floor, 1)) so that f is
/// a strictly increasing bijection of [0, inf). Only the tail of f matters for
/// the limits this library computes; the extension exists so that f^{-1} is
/// defined for small arguments (exponential-decay sampling, log n scalings).
class RegVarFn {
public:
    RegVarFn(double rho, double scale, double log_exponent = 0.0, double domain_floor = 0.0);

    double operator()(double t) const;

    /// Exact inverse: the unique t >= 0 with f(t) == x. Closed form when
    /// log_exponent == 0, otherwise monotone bisection in log t to 1e-13.
    double inverse(double x) const;

    double rho() const { return rho_; }
    double scale() const { return scale_; }
    double log_exponent() const { return log_exponent_; }
    double domain_floor() const { return domain_floor_; }

private:
    double rho_;
    double scale_;
    double log_exponent_;
    double domain_floor_;
    double cut_;    // max(domain_floor, 1): start of the power-log regime
    double f_cut_;  // f(cut_)
};

/// One Potter-bound violation report: worst pair and how far above the bound it sits.
struct PotterReport {
    bool ok = true;
    std::pair<double, double> worst_pair{0.0, 0.0};
    double max_excess = 0.0;  // max over the grid of f(y)/f(x) - C*max((y/x)^(rho+d),(y/x)^(rho-d))
};

/// Checks f(y)/f(x) <= C * max((y/x)^(rho+delta), (y/x)^(rho-delta)) on every
/// grid pair. Requires C > 1, delta >= 0, all coordinates >= K, nonempty grid.
PotterReport potter_check(const RegVarFn& f, double C, double delta, double K,
                          std::span<const std::pair<double, double>> grid);

}  // namespace perpetua

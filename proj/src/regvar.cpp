#include "perpetua/regvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace perpetua {

namespace {

// log f on the power-log regime, as a function of u = log t.
double log_f_at(double log_scale, double rho, double beta, double u) {
    return log_scale + rho * u + beta * std::log1p(u);
}

}  // namespace

RegVarFn::RegVarFn(double rho, double scale, double log_exponent, double domain_floor)
    : rho_(rho), scale_(scale), log_exponent_(log_exponent), domain_floor_(domain_floor) {
    if (!(rho > 0.0)) throw std::invalid_argument("RegVarFn: rho must be > 0");
    if (!(scale > 0.0)) throw std::invalid_argument("RegVarFn: scale must be > 0");
    if (!(domain_floor >= 0.0)) throw std::invalid_argument("RegVarFn: domain_floor must be >= 0");
    cut_ = std::max(domain_floor_, 1.0);
    // d/dt log f = (rho*(1+log t) + beta) / (t*(1+log t)); strict increase on
    // [cut, inf) needs rho*(1+log cut) + beta > 0. Holds automatically for beta >= 0.
    if (log_exponent_ < 0.0 && rho_ * (1.0 + std::log(cut_)) + log_exponent_ <= 0.0)
        throw std::invalid_argument(
            "RegVarFn: negative log_exponent needs a larger domain_floor to stay increasing");
    f_cut_ = scale_ * std::pow(cut_, rho_) *
             (log_exponent_ == 0.0 ? 1.0 : std::pow(1.0 + std::log(cut_), log_exponent_));
}

double RegVarFn::operator()(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("RegVarFn::eval: t must be >= 0");
    if (t < cut_) return f_cut_ * (t / cut_);
    if (log_exponent_ == 0.0) return scale_ * std::pow(t, rho_);
    return scale_ * std::pow(t, rho_) * std::pow(1.0 + std::log(t), log_exponent_);
}

double RegVarFn::inverse(double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("RegVarFn::inverse: x must be >= 0");
    if (std::isinf(x)) return x;
    if (x <= f_cut_) return x * cut_ / f_cut_;
    if (log_exponent_ == 0.0) return std::pow(x / scale_, 1.0 / rho_);

    const double target = std::log(x);
    const double log_scale = std::log(scale_);
    double lo = std::log(cut_);
    double hi = std::max(lo + 1.0, (target - log_scale) / rho_ + 1.0);
    while (log_f_at(log_scale, rho_, log_exponent_, hi) < target) hi += hi - lo + 1.0;
    // Bisection in u = log t, absolute tolerance 1e-13; this gives ~1e-13
    // relative accuracy in t, comfortably inside the 1e-12 round-trip contract.
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (log_f_at(log_scale, rho_, log_exponent_, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

PotterReport potter_check(const RegVarFn& f, double C, double delta, double K,
                          std::span<const std::pair<double, double>> grid) {
    if (!(C > 1.0)) throw std::invalid_argument("potter_check: C must be > 1");
    if (!(delta >= 0.0)) throw std::invalid_argument("potter_check: delta must be >= 0");
    if (grid.empty()) throw std::invalid_argument("potter_check: empty grid");
    PotterReport report;
    report.max_excess = -std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : grid) {
        if (!(x >= K && y >= K))
            throw std::invalid_argument("potter_check: grid point below K");
        const double r = y / x;
        const double bound =
            C * std::max(std::pow(r, f.rho() + delta), std::pow(r, f.rho() - delta));
        const double excess = f(y) / f(x) - bound;
        if (excess > report.max_excess) {
            report.max_excess = excess;
            report.worst_pair = {x, y};
        }
    }
    report.ok = report.max_excess <= 0.0;
    return report;
}

}  // namespace perpetua

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace perpetua {

struct MinResult {
    double x = std::numeric_limits<double>::quiet_NaN();
    double value = std::numeric_limits<double>::infinity();
};

namespace detail {
constexpr double kGoldenRatio = 0.6180339887498949;  // (sqrt(5)-1)/2
}

/// Golden-section search on [lo, hi]. The objective may return +inf on part of
/// the interval. Returns the best point ever evaluated, which keeps the result
/// meaningful at kinks and boundary infima: the reported value is always an
/// upper bound on the true infimum over the probed points.
template <typename F>
MinResult golden_section(F&& f, double lo, double hi, double x_tol_rel = 1e-9,
                         double x_tol_abs = 0.0) {
    MinResult best;
    auto consider = [&](double x, double v) {
        if (v < best.value || (v == best.value && x < best.x)) {
            best.x = x;
            best.value = v;
        }
    };
    consider(lo, f(lo));
    consider(hi, f(hi));
    double a = lo, b = hi;
    double x1 = b - detail::kGoldenRatio * (b - a);
    double x2 = a + detail::kGoldenRatio * (b - a);
    double f1 = f(x1), f2 = f(x2);
    consider(x1, f1);
    consider(x2, f2);
    const std::size_t max_iter = 200;
    for (std::size_t it = 0; it < max_iter; ++it) {
        const double tol = x_tol_abs + x_tol_rel * (std::abs(a) + std::abs(b)) * 0.5;
        if (b - a <= tol) break;
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - detail::kGoldenRatio * (b - a);
            f1 = f(x1);
            consider(x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + detail::kGoldenRatio * (b - a);
            f2 = f(x2);
            consider(x2, f2);
        }
    }
    return best;
}

/// Dense pre-scan over an explicit grid followed by golden-section refinement
/// of the bracketing cell. The pre-scan is what makes this robust for
/// objectives that need not be unimodal; ties break toward the smallest x.
template <typename F>
MinResult minimize_on_grid(F&& f, std::span<const double> grid, double x_tol_rel = 1e-9,
                           double x_tol_abs = 0.0) {
    MinResult best;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = f(grid[i]);
        if (v < best.value) {
            best.value = v;
            best.x = grid[i];
            best_i = i;
        }
    }
    if (!std::isfinite(best.value) || grid.size() < 2) return best;
    const double lo = grid[best_i == 0 ? 0 : best_i - 1];
    const double hi = grid[best_i + 1 < grid.size() ? best_i + 1 : grid.size() - 1];
    if (hi > lo) {
        const MinResult refined = golden_section(f, lo, hi, x_tol_rel, x_tol_abs);
        if (refined.value < best.value || (refined.value == best.value && refined.x < best.x))
            return refined;
    }
    return best;
}

}  // namespace perpetua

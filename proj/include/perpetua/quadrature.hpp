#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace perpetua {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr double kGkNode[8] = {
    0.0,
    0.405845151377397166906606412076961,
    0.741531185599394439863864773280788,
    0.949107912342758524526189684047851,
    0.207784955007898467600689403773245,
    0.586087235467691130294144838258730,
    0.864864423359769072789712788640926,
    0.991455371120812639206854697526329,
};
inline constexpr double kKronrodWeight[8] = {
    0.209482141084727828012999174891714,
    0.190350578064785409913256402421014,
    0.140653259715525918745189590510238,
    0.063092092629978553290700663189204,
    0.204432940075298892414161999234649,
    0.169004726639267902826583426598550,
    0.104790010322250183839876322541518,
    0.022935322010529224963732008058970,
};
inline constexpr double kGaussWeight[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
};

template <typename F>
inline void gk15(F&& f, double a, double b, double& value, double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double kron = kKronrodWeight[0] * f0;
    double gauss = kGaussWeight[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kGkNode[i];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kKronrodWeight[i] * fsum;
        if (i < 4) gauss += kGaussWeight[i] * fsum;
    }
    value = kron * h;
    const double diff = 200.0 * std::abs((kron - gauss) * h);
    error = diff * std::min(1.0, std::sqrt(diff));
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 7-15 on [a, b] with an interval worklist.
template <typename F>
QuadResult quad_adaptive(F&& f, double a, double b, double abs_tol = 1e-12,
                         double rel_tol = 1e-10, std::size_t max_intervals = 4000) {
    QuadResult result;
    if (!(b > a)) return result;
    struct Interval {
        double a, b, value, error;
    };
    double v, e;
    detail::gk15(f, a, b, v, e);
    std::vector<Interval> work{{a, b, v, e}};
    double total = v, total_err = e;
    std::size_t splits = 0;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        auto worst = std::max_element(work.begin(), work.end(),
                                      [](const Interval& l, const Interval& r) {
                                          return l.error < r.error;
                                      });
        if (worst == work.end() || ++splits > max_intervals) {
            result.converged = false;
            break;
        }
        const Interval cur = *worst;
        const double mid = 0.5 * (cur.a + cur.b);
        if (mid <= cur.a || mid >= cur.b) {  // interval at machine resolution
            result.converged = false;
            break;
        }
        Interval left{cur.a, mid, 0, 0}, right{mid, cur.b, 0, 0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        total += left.value + right.value - cur.value;
        total_err += left.error + right.error - cur.error;
        *worst = left;
        work.push_back(right);
    }
    result.value = total;
    result.error = total_err;
    return result;
}

/// log of the integral of exp(L(x)) dx over the span of `scan_grid`, computed
/// without underflow by factoring out the running maximum of L.
///
/// The scan cells are refined by bisection until the endpoint log-variation of
/// every kept piece is below half a nat, so integrand features narrower than a
/// scan cell (tail integrands at large scale parameters concentrate on ~1e-9
/// of the domain) are chased down rather than averaged away. Pieces whose
/// endpoints sit more than ~760 nats below the maximum are beyond double
/// resolution relative to it and are dropped. Each final piece is handled by a
/// single 15-point rule, exact to machine precision at that variation. Returns
/// -inf when L is -inf everywhere it was probed.
template <typename L>
double log_integral(L&& log_f, std::span<const double> scan_grid) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    const std::size_t n = scan_grid.size();
    if (n < 2) return neg_inf;

    struct Segment {
        double a, la, b, lb;
        int depth;
    };
    std::vector<Segment> work, pieces;
    work.reserve(n);
    double m = neg_inf;
    {
        std::vector<double> lv(n);
        for (std::size_t i = 0; i < n; ++i) {
            lv[i] = log_f(scan_grid[i]);
            if (lv[i] > m) m = lv[i];
        }
        if (m == neg_inf) return neg_inf;
        for (std::size_t i = 0; i + 1 < n; ++i)
            work.push_back({scan_grid[i], lv[i], scan_grid[i + 1], lv[i + 1], 0});
    }
    while (!work.empty()) {
        const Segment s = work.back();
        work.pop_back();
        if (std::max(s.la, s.lb) < m - 760.0) continue;
        const double span = s.b - s.a;
        const bool flat =
            std::abs(s.la - s.lb) <= 0.5 && std::isfinite(s.la) && std::isfinite(s.lb);
        if (flat || s.depth >= 64 ||
            span <= 1e-15 * (std::abs(s.a) + std::abs(s.b) + 1e-300)) {
            pieces.push_back(s);
            continue;
        }
        const double mid = 0.5 * (s.a + s.b);
        const double lm = log_f(mid);
        if (lm > m) m = lm;
        work.push_back({s.a, s.la, mid, lm, s.depth + 1});
        work.push_back({mid, lm, s.b, s.lb, s.depth + 1});
    }

    auto shifted = [&](double x) {
        const double l = log_f(x) - m;
        return l < -760.0 ? 0.0 : std::exp(l);
    };
    double sum = 0.0;
    for (const Segment& s : pieces) {
        if (std::max(s.la, s.lb) < m - 760.0) continue;
        double value, error;
        detail::gk15(shifted, s.a, s.b, value, error);
        sum += value;
    }
    if (sum <= 0.0) return neg_inf;
    return m + std::log(sum);
}

/// Numerically stable log(exp(a) + exp(b)).
inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace perpetua

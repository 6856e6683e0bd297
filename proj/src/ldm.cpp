#include "perpetua/ldm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "perpetua/errors.hpp"
#include "perpetua/grid.hpp"
#include "perpetua/parallel.hpp"

namespace perpetua {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadratureFloor = 1e-300;
}  // namespace

// --- LDMCurve ------------------------------------------------------------------

double LDMCurve::operator()(double y) const {
    if (y <= y_grid.front()) return values.front();
    if (y >= y_grid.back()) return values.back();
    const auto it = std::upper_bound(y_grid.begin(), y_grid.end(), y);
    const std::size_t i = static_cast<std::size_t>(it - y_grid.begin());
    const double vl = values[i - 1], vr = values[i];
    if (std::isinf(vl)) return vl;
    const double w = (y - y_grid[i - 1]) / (y_grid[i] - y_grid[i - 1]);
    return vl + w * (vr - vl);
}

void LDMCurve::validate(double slack) const {
    if (y_grid.size() != values.size() || y_grid.empty())
        throw std::invalid_argument("LDMCurve: grid/value size mismatch");
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        if (!(y_grid[i] >= 0.0)) throw std::invalid_argument("LDMCurve: negative y");
        if (i > 0 && !(y_grid[i] > y_grid[i - 1]))
            throw std::invalid_argument("LDMCurve: y grid must strictly increase");
        if (i > 0 && values[i] > values[i - 1] + slack)
            throw property_failure("LDMCurve: values must be nonincreasing in y");
        if (a_plus > 0.0 && y_grid[i] > 1.0 / a_plus && !(std::abs(values[i]) <= slack))
            throw property_failure("LDMCurve: values must vanish above 1/a_plus");
        if (std::isfinite(gamma0) && a_plus > 0.0) {
            const double floor =
                gamma0 * std::pow(std::max(1.0 - a_plus * y_grid[i], 0.0), rho);
            if (values[i] < floor - slack)
                throw property_failure("LDMCurve: value below the g(0)(1-a_plus y)^rho bound");
        }
    }
}

// --- closed forms ----------------------------------------------------------------

double ldm_pqd(double gamma, double a_plus, double rho, double y) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("ldm_pqd: gamma must be finite and >= 0");
    if (!(a_plus > 0.0 && a_plus <= 1.0))
        throw std::invalid_argument("ldm_pqd: a_plus must be in (0,1]");
    if (!(rho > 0.0)) throw std::invalid_argument("ldm_pqd: rho must be > 0");
    if (!(y >= 0.0)) throw std::invalid_argument("ldm_pqd: y must be >= 0");
    const double base = std::max(1.0 - a_plus * y, 0.0);
    return base == 0.0 ? 0.0 : gamma * std::pow(base, rho);
}

MinResult ldm_example8_inf(const AlphaFn& alpha, double rho, double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("ldm_example8: y must be >= 0");
    if (!(rho > 0.0)) throw std::invalid_argument("ldm_example8: rho must be > 0");
    const double a_sup = alpha.domain_sup();
    if (y * a_sup > 1.0) return {0.0, 0.0};  // limit vanishes beyond 1/ess-sup(A)
    // Minimize rho log(1 - y a) + log alpha(a) over the support of A; log space
    // keeps case_b finite as a -> 1 where alpha blows up.
    auto log_obj = [&](double a) { return rho * std::log1p(-y * a) + alpha.log_value(a); };
    const std::vector<double> grid = linspace(0.0, std::min(a_sup, 1.0 - 1e-12), 2048);
    MinResult best = minimize_on_grid(log_obj, grid);
    return {best.x, std::exp(best.value)};
}

double ldm_example8(const AlphaFn& alpha, double rho, double y) {
    return ldm_example8_inf(alpha, rho, y).value;
}

LDMCurve make_pqd_curve(double gamma, double a_plus, double rho,
                        std::span<const double> y_grid) {
    LDMCurve c;
    c.y_grid.assign(y_grid.begin(), y_grid.end());
    c.values.reserve(y_grid.size());
    for (double y : y_grid) c.values.push_back(ldm_pqd(gamma, a_plus, rho, y));
    c.source = LdmSource::pqd_closed;
    c.rho = rho;
    c.gamma0 = gamma;
    c.a_plus = a_plus;
    c.validate(1e-9);
    return c;
}

LDMCurve make_example8_curve(const AlphaFn& alpha, double rho, std::size_t n_points) {
    LDMCurve c;
    const double y_edge = 1.0 / alpha.domain_sup();  // g vanishes beyond here
    c.y_grid = linspace(0.0, y_edge, n_points);
    // two points past the edge so interpolation and flat extension hit the exact 0
    c.y_grid.push_back(y_edge * (1.0 + 1e-9));
    c.y_grid.push_back(2.0 * y_edge);
    c.values.reserve(c.y_grid.size());
    for (double y : c.y_grid) c.values.push_back(ldm_example8(alpha, rho, y));
    c.source = LdmSource::example8_closed;
    c.rho = rho;
    c.gamma0 = c.values.front();
    c.a_plus = alpha.domain_sup();
    c.validate(1e-6);
    return c;
}

// --- finite-t estimation -----------------------------------------------------------

LdmEstimate ldm_estimate(const PairModel& model, const RegVarFn& f, double y,
                         std::span<const double> t_grid, LdmMode mode,
                         std::uint64_t n_samples, std::uint64_t seed, int workers) {
    if (t_grid.empty()) throw std::invalid_argument("ldm_estimate: empty t grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("ldm_estimate: t grid must be increasing");
    if (mode == LdmMode::monte_carlo && n_samples < 100000)
        throw std::invalid_argument("ldm_estimate: monte_carlo mode needs n >= 1e5");

    LdmEstimate out;
    out.mode = mode;
    out.rows.resize(t_grid.size());

    if (mode == LdmMode::quadrature) {
        out.floor = kQuadratureFloor;
        const double log_floor = std::log(kQuadratureFloor);
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const double t = t_grid[i];
            const double lp = model.log_event_prob(t, y);
            LdmEstimateRow& row = out.rows[i];
            row.y = y;
            row.t = t;
            row.log_prob = lp;
            row.prob = std::exp(lp);
            row.ratio = -lp / f(t);
            row.floor_hit = lp < log_floor;
        }
    } else {
        out.floor = 10.0 / static_cast<double>(n_samples);
        std::vector<std::uint64_t> hits(t_grid.size(), 0);
        parallel_for(t_grid.size(), workers, [&](std::size_t i) {
            Rng rng = Rng::stream(seed, i);
            const double t = t_grid[i];
            std::uint64_t h = 0;
            for (std::uint64_t k = 0; k < n_samples; ++k) {
                const auto [a, b] = model.sample(rng);
                if (a * t * y + b > t) ++h;
            }
            hits[i] = h;
        });
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            LdmEstimateRow& row = out.rows[i];
            row.y = y;
            row.t = t_grid[i];
            const double p = static_cast<double>(hits[i]) / static_cast<double>(n_samples);
            row.prob = p;
            row.log_prob = hits[i] == 0 ? -kInf : std::log(p);
            row.ratio = hits[i] == 0 ? kInf : -row.log_prob / f(t_grid[i]);
            row.floor_hit = hits[i] < 10;
        }
        out.infinite =
            std::all_of(hits.begin(), hits.end(), [](std::uint64_t h) { return h == 0; });
    }

    out.estimate = std::numeric_limits<double>::quiet_NaN();
    for (const LdmEstimateRow& row : out.rows)
        if (!row.floor_hit) out.estimate = row.ratio;
    if (out.infinite) out.estimate = kInf;
    return out;
}

LDMCurve make_estimate_curve(const PairModel& model, const RegVarFn& f,
                             std::span<const double> y_grid,
                             std::span<const double> t_grid, LdmMode mode,
                             std::uint64_t n_samples, std::uint64_t seed, int workers,
                             double slack) {
    LDMCurve c;
    c.y_grid.assign(y_grid.begin(), y_grid.end());
    c.values.reserve(y_grid.size());
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        const LdmEstimate est = ldm_estimate(model, f, y_grid[i], t_grid, mode, n_samples,
                                             seed + i, workers);
        c.values.push_back(est.infinite ? kInf : est.estimate);
    }
    c.source = LdmSource::finite_t_estimate;
    c.rho = f.rho();
    c.gamma0 = c.values.front();
    c.a_plus = model.a_plus();
    c.validate(slack);
    return c;
}

}  // namespace perpetua

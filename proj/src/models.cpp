#include "perpetua/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "perpetua/errors.hpp"
#include "perpetua/grid.hpp"
#include "perpetua/quadrature.hpp"

namespace perpetua {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAtomMassLog = -0.45867514538708193;  // log(1 - e^{-1})
}  // namespace

// --- AlphaFn -----------------------------------------------------------------

AlphaFn AlphaFn::case_a(double rho) {
    if (!(rho > 1.0))
        throw std::invalid_argument("AlphaFn::case_a: rho must be > 1 (alpha nondecreasing)");
    AlphaFn a;
    a.variant_ = Variant::case_a;
    a.rho_ = rho;
    return a;
}

AlphaFn AlphaFn::case_b() {
    AlphaFn a;
    a.variant_ = Variant::case_b;
    return a;
}

AlphaFn AlphaFn::table(std::vector<double> a_knots, std::vector<double> values) {
    if (a_knots.size() != values.size() || a_knots.size() < 2)
        throw std::invalid_argument("AlphaFn::table: need >= 2 matching knots");
    if (a_knots.front() != 0.0 || values.front() != 1.0)
        throw std::invalid_argument("AlphaFn::table: first knot must be (0, 1)");
    for (std::size_t i = 1; i < a_knots.size(); ++i) {
        if (!(a_knots[i] > a_knots[i - 1]) || !(a_knots[i] < 1.0))
            throw std::invalid_argument("AlphaFn::table: abscissae must increase within [0,1)");
        if (values[i] < values[i - 1])
            throw std::invalid_argument("AlphaFn::table: values must be nondecreasing");
    }
    AlphaFn a;
    a.variant_ = Variant::table;
    a.knots_a_ = std::move(a_knots);
    a.knots_v_ = std::move(values);
    return a;
}

double AlphaFn::operator()(double a) const {
    if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("AlphaFn: a must be in [0,1)");
    switch (variant_) {
        case Variant::case_a:
            return std::pow(1.0 - a, 1.0 - rho_);
        case Variant::case_b:
            return std::exp(a / (1.0 - a));
        case Variant::table: {
            if (a >= knots_a_.back()) return knots_v_.back();
            const auto it = std::upper_bound(knots_a_.begin(), knots_a_.end(), a);
            const std::size_t i = static_cast<std::size_t>(it - knots_a_.begin());
            const double w = (a - knots_a_[i - 1]) / (knots_a_[i] - knots_a_[i - 1]);
            return knots_v_[i - 1] + w * (knots_v_[i] - knots_v_[i - 1]);
        }
    }
    return 1.0;
}

double AlphaFn::log_value(double a) const {
    if (variant_ == Variant::case_b) {
        if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("AlphaFn: a must be in [0,1)");
        return a / (1.0 - a);
    }
    if (variant_ == Variant::case_a) {
        if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("AlphaFn: a must be in [0,1)");
        return (1.0 - rho_) * std::log1p(-a);
    }
    return std::log((*this)(a));
}

double AlphaFn::domain_sup() const {
    return variant_ == Variant::table ? knots_a_.back() : 1.0;
}

double AlphaFn::inverse(double u) const {
    switch (variant_) {
        case Variant::case_a:
            if (u <= 1.0) return 0.0;
            // u = (1-a)^(1-rho)  =>  a = 1 - u^(-1/(rho-1))
            return 1.0 - std::pow(u, -1.0 / (rho_ - 1.0));
        case Variant::case_b: {
            if (u <= 1.0) return 0.0;
            const double l = std::log(u);
            return l / (1.0 + l);
        }
        case Variant::table: {
            if (u < knots_v_.front()) return 0.0;
            if (u >= knots_v_.back()) return knots_a_.back();
            // upper_bound skips equal values, so a flat stretch at level u
            // resolves to its right end: the generalized inverse sup{a: alpha(a) <= u}
            const auto it = std::upper_bound(knots_v_.begin(), knots_v_.end(), u);
            const std::size_t i = static_cast<std::size_t>(it - knots_v_.begin());
            const double dv = knots_v_[i] - knots_v_[i - 1];
            const double w = (u - knots_v_[i - 1]) / dv;
            return knots_a_[i - 1] + w * (knots_a_[i] - knots_a_[i - 1]);
        }
    }
    return 0.0;
}

// --- PairModel construction --------------------------------------------------

namespace {

void validate_a_law(const ALaw& law) {
    std::visit(
        [](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, PointMassA>) {
                // a_plus == 0 is the degenerate A == 0 case (X collapses to B)
                if (!(a.a_plus >= 0.0 && a.a_plus < 1.0))
                    throw std::invalid_argument("PointMassA: a_plus must be in [0,1)");
            } else if constexpr (std::is_same_v<T, UniformA>) {
                if (!(a.a_plus > 0.0 && a.a_plus < 1.0))
                    throw std::invalid_argument("UniformA: a_plus must be in (0,1)");
            } else {
                if (!(a.a_plus > 0.0 && a.a_plus < 1.0))
                    throw std::invalid_argument("PowerA: a_plus must be in (0,1)");
                if (!(a.shape > 0.0)) throw std::invalid_argument("PowerA: shape must be > 0");
            }
        },
        law);
}

void validate_b_law(const BLaw& law) {
    std::visit(
        [](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, WeibullB>) {
                if (!(b.sigma > 0.0)) throw std::invalid_argument("WeibullB: sigma must be > 0");
                if (!(b.rho_b > 0.0)) throw std::invalid_argument("WeibullB: rho must be > 0");
            } else {
                if (!(b.value > 0.0)) throw std::invalid_argument("ConstantB: value must be > 0");
            }
        },
        law);
}

double a_law_ess_sup(const ALaw& law) {
    return std::visit([](const auto& a) { return a.a_plus; }, law);
}

// Conditional survival of B given A = a on the continuous branch,
// S(b|a) = b^rho exp(-alpha(a)(b^rho - 1)), derived from the joint survival.
double conditional_survival(double log_alpha_a, double rho, double b) {
    if (b <= 1.0) return 1.0;
    const double w = std::pow(b, rho);
    return std::exp(rho * std::log(b) - std::exp(log_alpha_a) * (w - 1.0));
}

// Re-derive S(b|a) from central finite differences of the joint survival and
// compare against the closed form. Guards the sampler against a bad derivation.
void verify_conditional_survival(const AtomSurvivalParams& p) {
    std::vector<double> as;
    if (p.alpha.variant() == AlphaFn::Variant::table) {
        // stay away from knots, where alpha' jumps and the FD ratio is skewed
        as = {0.05, 0.15, 0.35, 0.55};
    } else {
        as = {0.1, 0.3, 0.5, 0.7};
    }
    const double h = 1e-5;
    for (double a : as) {
        const double am = p.alpha(a - h), ap = p.alpha(a + h);
        for (double b : {1.25, 2.0, 3.0}) {
            const double w = std::pow(b, p.rho);
            const double num = std::exp(-am * w) - std::exp(-ap * w);
            const double den = std::exp(-am) - std::exp(-ap);
            if (den <= 0.0) continue;  // alpha flat here, no conditional mass
            const double fd = num / den;
            const double closed = conditional_survival(p.alpha.log_value(a), p.rho, b);
            if (std::abs(fd - closed) > 1e-6 * std::max(1.0, std::abs(closed)))
                throw property_failure(
                    "atom_survival: conditional survival disagrees with finite differences "
                    "of the joint survival");
        }
    }
}

}  // namespace

PairModel::PairModel(std::variant<IndependentParams, AtomSurvivalParams> p)
    : params_(std::move(p)) {}

PairModel PairModel::independent(ALaw a_law, BLaw b_law) {
    validate_a_law(a_law);
    validate_b_law(b_law);
    PairModel m(IndependentParams{std::move(a_law), std::move(b_law)});
    m.a_plus_ = a_law_ess_sup(m.independent_params().A);
    return m;
}

PairModel PairModel::atom_survival(double rho, AlphaFn alpha) {
    if (!(rho > 0.0)) throw std::invalid_argument("atom_survival: rho must be > 0");
    AtomSurvivalParams p{rho, std::move(alpha)};
    verify_conditional_survival(p);
    PairModel m(std::variant<IndependentParams, AtomSurvivalParams>(std::move(p)));
    m.a_plus_ = m.atom_params().alpha.domain_sup();
    return m;
}

// --- sampling ----------------------------------------------------------------

std::pair<double, double> PairModel::sample(Rng& rng) const {
    if (is_independent()) {
        const auto& p = independent_params();
        const double a = std::visit(
            [&](const auto& law) -> double {
                using T = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<T, UniformA>) return law.a_plus * rng.uniform();
                if constexpr (std::is_same_v<T, PointMassA>) return law.a_plus;
                if constexpr (std::is_same_v<T, PowerA>)
                    return law.a_plus * std::pow(rng.uniform(), 1.0 / law.shape);
            },
            p.A);
        const double b = std::visit(
            [&](const auto& law) -> double {
                using T = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<T, WeibullB>)
                    return law.sigma * std::pow(rng.exponential(), 1.0 / law.rho_b);
                if constexpr (std::is_same_v<T, ConstantB>) return law.value;
            },
            p.B);
        return {a, b};
    }

    const auto& p = atom_params();
    const double e = rng.exponential();
    if (e <= 1.0) return {0.0, 1.0};  // the atom carries mass 1 - e^{-1}
    const double a = p.alpha.inverse(e);  // inverse transform: alpha(a) = e

    // Draw B from S(b|a) = b^rho exp(-e(b^rho - 1)) by monotone bisection in
    // w = b^rho: q(w) = log w - e(w - 1) is strictly decreasing for e >= 1.
    const double target = std::log(rng.uniform());
    auto q = [&](double w) { return std::log(w) - e * (w - 1.0); };
    double lo = 1.0, hi = 2.0;
    int iters = 0;
    while (q(hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (++iters > 200) throw std::runtime_error("atom_survival sampler: bracket failure");
    }
    while (hi - lo > 1e-13 * hi) {
        if (++iters > 200)
            throw std::runtime_error("atom_survival sampler: bisection did not converge");
        const double mid = 0.5 * (lo + hi);
        if (q(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return {a, std::pow(0.5 * (lo + hi), 1.0 / p.rho)};
}

// --- survivals ---------------------------------------------------------------

double PairModel::survival_a(double a) const {
    if (a < 0.0) return 1.0;
    if (is_independent()) {
        const auto& p = independent_params();
        return std::visit(
            [&](const auto& law) -> double {
                using T = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<T, UniformA>)
                    return a >= law.a_plus ? 0.0 : 1.0 - a / law.a_plus;
                if constexpr (std::is_same_v<T, PointMassA>)
                    return a < law.a_plus ? 1.0 : 0.0;
                if constexpr (std::is_same_v<T, PowerA>)
                    return a >= law.a_plus ? 0.0
                                           : 1.0 - std::pow(a / law.a_plus, law.shape);
            },
            p.A);
    }
    if (a >= a_plus_) return 0.0;  // table alphas put an atom at the last knot
    return std::exp(-atom_params().alpha(a));
}

double PairModel::survival_b(double b) const {
    if (b < 0.0) return 1.0;
    if (is_independent()) {
        const auto& p = independent_params();
        return std::visit(
            [&](const auto& law) -> double {
                using T = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<T, WeibullB>)
                    return std::exp(-std::pow(b / law.sigma, law.rho_b));
                if constexpr (std::is_same_v<T, ConstantB>) return b < law.value ? 1.0 : 0.0;
            },
            p.B);
    }
    if (b < 1.0) return 1.0;
    return std::exp(-std::pow(b, atom_params().rho));
}

std::optional<double> PairModel::b_tail_neg_log(double t) const {
    if (t < 0.0) return 0.0;
    if (is_independent()) {
        const auto& p = independent_params();
        if (const auto* w = std::get_if<WeibullB>(&p.B))
            return std::pow(t / w->sigma, w->rho_b);
        const auto& c = std::get<ConstantB>(p.B);
        return t < c.value ? 0.0 : kInf;
    }
    if (t < 1.0) return 0.0;
    return std::pow(t, atom_params().rho);
}

double PairModel::joint_survival(double a, double b) const {
    if (is_independent()) return survival_a(a) * survival_b(b);
    if (!(a >= 0.0 && a < 1.0))
        throw std::invalid_argument("joint_survival: a must be in [0,1) for atom_survival");
    if (a >= a_plus_) return 0.0;
    // B >= 1 a.s. on the A > a event, so b below 1 clamps to the A marginal.
    const double beta = std::pow(std::max(b, 1.0), atom_params().rho);
    return std::exp(-atom_params().alpha(a) * beta);
}

double PairModel::ess_sup_ratio() const {
    if (!is_independent()) return kInf;  // atom_survival B has the full e^{-b^rho} tail
    const auto& p = independent_params();
    if (std::holds_alternative<WeibullB>(p.B)) return kInf;
    const double b0 = std::get<ConstantB>(p.B).value;
    return b0 / (1.0 - a_plus_);
}

// --- event probability P(A t y + B > t) ---------------------------------------

namespace {

// log survival of Weibull B at x (x may be <= 0).
double log_weibull_survival(const WeibullB& w, double x) {
    if (x <= 0.0) return 0.0;
    return -std::pow(x / w.sigma, w.rho_b);
}

}  // namespace

double PairModel::log_event_prob(double t, double y) const {
    if (!(t > 0.0)) throw std::invalid_argument("event_prob: t must be > 0");
    if (!(y >= 0.0)) throw std::invalid_argument("event_prob: y must be >= 0");

    if (is_independent()) {
        const auto& p = independent_params();

        if (const auto* cb = std::get_if<ConstantB>(&p.B)) {
            // A t y + b0 > t  <=>  A > (t - b0)/(t y)
            if (t <= cb->value) return 0.0;
            if (y == 0.0) return -kInf;
            const double s = survival_a((t - cb->value) / (t * y));
            return s > 0.0 ? std::log(s) : -kInf;
        }
        const auto& wb = std::get<WeibullB>(p.B);

        if (const auto* pm = std::get_if<PointMassA>(&p.A))
            return log_weibull_survival(wb, t * (1.0 - y * pm->a_plus));

        // Uniform and power A both reduce to a uniform integral via the
        // quantile substitution a(v) = a_plus * v^(1/shape), v ~ U(0,1).
        const double ap = a_plus_;
        const double shape =
            std::holds_alternative<PowerA>(p.A) ? std::get<PowerA>(p.A).shape : 1.0;
        auto log_integrand = [&](double v) {
            const double a = ap * std::pow(v, 1.0 / shape);
            return log_weibull_survival(wb, t * (1.0 - y * a));
        };
        const std::vector<double> grid = linspace(0.0, 1.0, 2049);
        return log_integral(log_integrand, grid);
    }

    // atom_survival: atom contributes iff B = 1 exceeds t; the continuous part
    // is integrated in u = alpha(a) space where the A density is exp(-u) du
    // and no alpha' factor appears (works for tabulated alpha too).
    const auto& p = atom_params();
    const double log_atom = (t < 1.0) ? kAtomMassLog : -kInf;
    auto log_integrand = [&](double u) {
        const double x = t * (1.0 - y * p.alpha.inverse(u));
        if (x <= 1.0) return -u;
        return p.rho * std::log(x) - u * std::pow(x, p.rho);
    };
    double upper = 64.0;
    double log_cont = -kInf;
    for (int tries = 0; tries < 12; ++tries) {
        const std::vector<double> grid = logspace(1.0, upper, 2049);
        double m = -kInf;
        for (double u : grid) m = std::max(m, log_integrand(u));
        if (log_integrand(upper) < m - 900.0 || tries == 11) {
            log_cont = log_integral(log_integrand, grid);
            break;
        }
        upper *= 8.0;  // slow e^{-u} tail regime: extend until negligible
    }
    return log_add(log_atom, log_cont);
}

double PairModel::event_prob(double t, double y) const {
    return std::exp(log_event_prob(t, y));
}

// --- exponential-f-decay sampler ----------------------------------------------

double sample_ED(const RegVarFn& f, double lambda, Rng& rng) {
    if (lambda < 0.0) throw std::invalid_argument("sample_ED: lambda must be >= 0");
    if (lambda == 0.0) return kInf;  // survival exp(0) = 1 for all t
    return f.inverse(rng.exponential() / lambda);
}

}  // namespace perpetua

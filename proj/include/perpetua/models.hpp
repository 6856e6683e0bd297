#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "perpetua/regvar.hpp"
#include "perpetua/rng.hpp"

namespace perpetua {

/// Continuous nondecreasing index function alpha: [0,1) -> [1,inf) with
/// alpha(0) = 1, parameterizing the atom-plus-joint-survival family.
class AlphaFn {
public:
    enum class Variant { case_a, case_b, table };

    /// alpha(a) = (1-a)^(1-rho); nondecreasing requires rho > 1.
    static AlphaFn case_a(double rho);
    /// alpha(a) = exp(a / (1-a)).
    static AlphaFn case_b();
    /// Monotone piecewise-linear interpolant through (a_i, v_i). Knots must
    /// start at (0, 1), increase in a within [0,1), and be nondecreasing in v.
    /// Beyond the last knot alpha is held constant (the generalized inverse
    /// then never produces values above the last knot's abscissa).
    static AlphaFn table(std::vector<double> a_knots, std::vector<double> values);

    double operator()(double a) const;
    /// log alpha(a); avoids overflow for case_b near a -> 1.
    double log_value(double a) const;
    /// Generalized inverse: sup{a : alpha(a) <= u}, with alpha^{-1}(u) = 0 for u <= 1.
    double inverse(double u) const;
    /// Effective right end of the index domain: 1 for the closed forms; for a
    /// table it is the last knot, where the induced A law places an atom
    /// (alpha is held constant beyond, so the inverse never exceeds it).
    double domain_sup() const;

    Variant variant() const { return variant_; }
    double rho() const { return rho_; }

private:
    AlphaFn() = default;
    Variant variant_ = Variant::case_b;
    double rho_ = 0.0;  // case_a only
    std::vector<double> knots_a_, knots_v_;
};

// --- joint laws of (A, B) ---------------------------------------------------

struct UniformA {
    double a_plus;  // A ~ U(0, a_plus), a_plus in (0,1)
};
struct PointMassA {
    double a_plus;  // A == a_plus a.s., a_plus in (0,1)
};
struct PowerA {
    double a_plus;
    double shape;  // P(A <= a) = (a/a_plus)^shape on [0, a_plus], shape > 0
};
using ALaw = std::variant<UniformA, PointMassA, PowerA>;

struct WeibullB {
    double sigma;
    double rho_b;  // P(B > t) = exp(-(t/sigma)^rho_b), t >= 0
};
struct ConstantB {
    double value;  // B == value a.s.
};
using BLaw = std::variant<WeibullB, ConstantB>;

struct IndependentParams {
    ALaw A;
    BLaw B;
};

struct AtomSurvivalParams {
    double rho;
    AlphaFn alpha;
};

/// Joint law of a nonnegative pair (A, B) with A in [0, 1) or, for the
/// atom-survival family, ess sup A = 1. Immutable after construction; sampling
/// takes a caller-owned generator.
class PairModel {
public:
    /// Independent marginals. Validates parameter ranges.
    static PairModel independent(ALaw a_law, BLaw b_law);

    /// Atom at (A,B) = (0,1) with mass 1 - e^{-1}, and
    /// P(A > a, B > b) = exp(-alpha(a) b^rho) for a in [0,1), b >= 1.
    /// The conditional sampler formula S(b|a) = b^rho exp(-alpha(a)(b^rho - 1))
    /// is re-verified at construction against finite differences of the joint
    /// survival (tolerance 1e-6).
    static PairModel atom_survival(double rho, AlphaFn alpha);

    bool is_independent() const { return std::holds_alternative<IndependentParams>(params_); }
    const IndependentParams& independent_params() const {
        return std::get<IndependentParams>(params_);
    }
    const AtomSurvivalParams& atom_params() const {
        return std::get<AtomSurvivalParams>(params_);
    }

    /// Essential supremum of A.
    double a_plus() const { return a_plus_; }

    /// One exact draw from the joint law.
    std::pair<double, double> sample(Rng& rng) const;

    /// Exact P(A > a, B > b) from the analytic structure.
    double joint_survival(double a, double b) const;
    /// Marginal survivals.
    double survival_a(double a) const;
    double survival_b(double b) const;
    /// Closed form for -log P(B > t) where available.
    std::optional<double> b_tail_neg_log(double t) const;

    /// log P(A*t*y + B > t) by one-dimensional adaptive quadrature over the
    /// law of A (atom handled separately). Exact up to quadrature error
    /// ~1e-11 relative on the probability.
    double log_event_prob(double t, double y) const;
    double event_prob(double t, double y) const;

    /// ess sup of B/(1-A) given A < 1 (+inf for unbounded B).
    double ess_sup_ratio() const;

private:
    explicit PairModel(std::variant<IndependentParams, AtomSurvivalParams> p);
    std::variant<IndependentParams, AtomSurvivalParams> params_;
    double a_plus_ = 0.0;
};

/// One draw of Z with survival P(Z > t) = exp(-lambda * f(t)), t > 0, via
/// inverse transform through f. lambda == 0 yields +inf (degenerate flat tail).
double sample_ED(const RegVarFn& f, double lambda, Rng& rng);

}  // namespace perpetua

#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "perpetua/grid.hpp"
#include "perpetua/legendre.hpp"
#include "perpetua/models.hpp"

using namespace perpetua;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

LdmFunction step_ldm(double a_plus, double rho) {
    // the non-admissible illustration: infinite below 1/a_plus, zero from there on
    LdmFunction f;
    const double edge = 1.0 / a_plus;
    f.g = [edge](double y) { return y < edge ? kInf : 0.0; };
    f.rho = rho;
    f.a_plus = a_plus;
    f.gamma0 = kInf;
    return f;
}
}  // namespace

TEST_CASE("phi spot values") {
    SUBCASE("phi(0) = 0: the infimum of g, which vanishes beyond 1/a_plus") {
        const auto p = phi(pqd_ldm(1.0, 0.5, 2.0), 0.0);
        CHECK(p.value == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("pqd rho=2 fixed point value") {
        const auto p = phi(pqd_ldm(1.0, 0.5, 2.0), 0.75);
        CHECK(p.value == doctest::Approx(0.75).epsilon(1e-9));
        // closed form 1/(1/gamma + a_plus^2/lambda)
        CHECK(phi_pqd_closed(1.0, 0.5, 2.0, 0.75) ==
              doctest::Approx(1.0 / (1.0 + 0.25 / 0.75)).epsilon(1e-15));
    }
    SUBCASE("pqd rho=1 piecewise-linear branch") {
        const auto p = phi(pqd_ldm(1.0, 0.5, 1.0), 0.3);
        CHECK(p.value == doctest::Approx(0.6).epsilon(1e-9));
        CHECK(p.argmin_y == doctest::Approx(2.0).epsilon(1e-6));
    }
}

TEST_CASE("phi pqd closed form arithmetic") {
    CHECK(phi_pqd_closed(1.0, 1.0, 2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(phi_pqd_closed(1.0, 0.5, 0.5, 10.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(phi_pqd_closed(1.0, 0.5, 2.0, 0.0) == 0.0);
    CHECK(phi_pqd_closed(0.0, 0.5, 2.0, 1.0) == 0.0);
}

TEST_CASE("optimizer matches closed forms over the pqd family") {
    // the acceptance suite runs the full grid; this covers a spot sample
    for (double gamma : {0.5, 2.0}) {
        for (double ap : {0.25, 1.0}) {
            for (double rho : {0.5, 1.0, 3.0}) {
                const LdmFunction ldm = pqd_ldm(gamma, ap, rho);
                for (double lam : logspace(0.01, 100.0, 9)) {
                    CHECK(std::abs(phi(ldm, lam).value -
                                   phi_pqd_closed(gamma, ap, rho, lam)) <= 1e-6);
                }
                CHECK(std::abs(lambda_star(ldm).value -
                               lambda_star_pqd_closed(gamma, ap, rho)) <= 1e-6);
            }
        }
    }
}

TEST_CASE("lambda star") {
    SUBCASE("pqd closed forms") {
        CHECK(lambda_star_pqd_closed(2.0, 0.5, 2.0) == doctest::Approx(1.5));
        CHECK(lambda_star_pqd_closed(1.0, 0.3, 1.0) == 1.0);
        CHECK(lambda_star_pqd_closed(1.0, 1.0 - 1e-9, 2.0) ==
              doctest::Approx(0.0).epsilon(1e-8));
        const auto r = lambda_star(pqd_ldm(1.0, 0.5, 2.0));
        CHECK(r.value == doctest::Approx(0.75).epsilon(1e-9));
        CHECK(r.argmin_y == doctest::Approx(0.5).epsilon(1e-6));  // a_plus^{1/(rho-1)}
    }
    SUBCASE("pqd rho <= 1 infimum approached at the origin") {
        const auto r = lambda_star(pqd_ldm(1.0, 0.5, 0.7));
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("example8 case_a rho=2: objective reduces to inf(1+a) = 1") {
        const auto r = lambda_star(example8_ldm(AlphaFn::case_a(2.0), 2.0));
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("infinite gamma0 forces lambda* = infinity") {
        CHECK(std::isinf(lambda_star(step_ldm(1.0, 1.5)).value));
    }
}

TEST_CASE("admissibility") {
    SUBCASE("pqd example has a witness") {
        const auto r = admissibility(pqd_ldm(1.0, 0.5, 2.0));
        CHECK(r.admissible);
        REQUIRE(r.witness_lambda.has_value());
        const double w = *r.witness_lambda;
        CHECK(phi(pqd_ldm(1.0, 0.5, 2.0), w).value > w);
        // a concrete witness by hand: phi(0.1) = 1/3.5 > 0.1
        CHECK(phi_pqd_closed(1.0, 0.5, 2.0, 0.1) == doctest::Approx(1.0 / 3.5).epsilon(1e-12));
    }
    SUBCASE("step LDM with a_plus = 1 is non-admissible") {
        const auto r = admissibility(step_ldm(1.0, 1.5));
        CHECK_FALSE(r.admissible);
    }
    SUBCASE("identically zero g is admissible through the g(0) = 0 branch") {
        LdmFunction zero;
        zero.g = [](double) { return 0.0; };
        zero.rho = 2.0;
        zero.a_plus = 0.5;
        zero.gamma0 = 0.0;
        const auto r = admissibility(zero);
        CHECK(r.admissible);
        CHECK_FALSE(r.witness_lambda.has_value());
    }
}

TEST_CASE("fixed point check") {
    SUBCASE("pqd example: phi(0.75) = 0.75, ordering on both sides") {
        const auto rep = fixed_point_check(pqd_ldm(1.0, 0.5, 2.0), 1e-6);
        CHECK(rep.ok());
        CHECK(rep.lambda_star == doctest::Approx(0.75).epsilon(1e-9));
        CHECK(rep.residual <= 1e-6);
        // closed-form spot values on the two sides of the fixed point
        CHECK(phi_pqd_closed(1.0, 0.5, 2.0, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(phi_pqd_closed(1.0, 0.5, 2.0, 1.0) == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("example8 case_a rho=2 via the interpolation curve") {
        const LdmFunction ldm = curve_ldm(make_example8_curve(AlphaFn::case_a(2.0), 2.0));
        const auto rep = fixed_point_check(ldm, 1e-6);
        CHECK(rep.ok());
        CHECK(rep.lambda_star == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(phi(ldm, 1.0).value == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("zero curve: lambda* = 0 is trivially consistent") {
        const auto rep = fixed_point_check(pqd_ldm(0.0, 0.5, 2.0), 1e-6);
        CHECK(rep.ok());
        CHECK(rep.lambda_star == 0.0);
    }
    SUBCASE("infinite lambda* is a precondition error") {
        CHECK_THROWS_AS(fixed_point_check(step_ldm(1.0, 1.5), 1e-6),
                        std::invalid_argument);
    }
}

TEST_CASE("transform shape and bounds") {
    const double gamma = 1.0, ap = 0.5, rho = 2.0;
    const LdmFunction ldm = pqd_ldm(gamma, ap, rho);
    const auto lambdas = logspace(1e-3, 1e3, 61);
    const TransformReport rep = transform_report(ldm, lambdas);

    SUBCASE("nondecreasing and concave along the lambda grid") {
        CHECK(phi_shape_violation(rep.lambda_grid, rep.phi_values) <= 1e-9);
    }
    SUBCASE("phi(0) = 0 and the g(0+) cap") {
        CHECK(phi(ldm, 0.0).value == doctest::Approx(0.0).epsilon(1e-12));
        for (double v : rep.phi_values) CHECK(v <= gamma + 1e-9);
    }
    SUBCASE("sandwich: lambda a_plus^-rho >= phi >= the rho-branch lower bound") {
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            const double lam = rep.lambda_grid[i], v = rep.phi_values[i];
            CHECK(lam * std::pow(ap, -rho) + 1e-9 >= v);
            CHECK(v + 1e-9 >= phi_pqd_closed(gamma, ap, rho, lam));
        }
    }
    SUBCASE("report fields") {
        CHECK(rep.lambda_star == doctest::Approx(0.75).epsilon(1e-9));
        CHECK(rep.admissible);
        CHECK(rep.fixed_point_residual <= 1e-6);
    }
}

TEST_CASE("example8 transform agrees with the direct a-space reduction") {
    // Two algebraic routes to the same quantities for the atom family with
    // rho > 1: the generic y-space infimum behind phi / lambda*, and the
    // reduction obtained by swapping the infima and minimizing over a:
    //   phi(lambda)  = min{ inf_a (alpha(a)^{1/(1-rho)} + a^{rho/(rho-1)}
    //                       lambda^{1/(1-rho)})^{1-rho}, lambda }
    //   lambda*      = inf_a alpha(a) (1 - a^{rho/(rho-1)})^{rho-1}
    struct Case {
        AlphaFn alpha;
        double rho;
    };
    const std::vector<Case> cases{{AlphaFn::case_a(2.0), 2.0},
                                  {AlphaFn::case_b(), 3.0}};
    for (const auto& [alpha, rho] : cases) {
        const LdmFunction ldm = curve_ldm(make_example8_curve(alpha, rho));
        const double q = rho / (rho - 1.0), inv = 1.0 / (1.0 - rho);
        for (double lam : {0.2, 0.5, 1.0, 2.0, 5.0}) {
            const auto reduced = oracles::grid_minimum(
                [&](double a) {
                    return std::pow(std::pow(alpha(a), inv) +
                                        std::pow(a, q) * std::pow(lam, inv),
                                    1.0 - rho);
                },
                0.0, 1.0 - 1e-9, 200001);
            const double route_a = std::min(reduced.value, lam);
            CHECK(phi(ldm, lam).value == doctest::Approx(route_a).epsilon(5e-6));
        }
        const auto ls_reduced = oracles::grid_minimum(
            [&](double a) {
                return alpha(a) * std::pow(1.0 - std::pow(a, q), rho - 1.0);
            },
            0.0, 1.0 - 1e-9, 200001);
        CHECK(lambda_star(ldm).value ==
              doctest::Approx(ls_reduced.value).epsilon(2e-6));
    }
}

TEST_CASE("at most one positive fixed point") {
    // phi(c) - c crosses zero downward at most once on (0, 4 lambda*]
    for (const LdmFunction& ldm :
         {pqd_ldm(1.0, 0.5, 2.0), pqd_ldm(2.0, 0.9, 3.0), pqd_ldm(0.5, 0.25, 1.5)}) {
        const double ls = lambda_star(ldm).value;
        REQUIRE(ls > 0.0);
        int sign_changes = 0;
        int prev_sign = 0;
        for (double c : linspace(ls / 50.0, 4.0 * ls, 200)) {
            const double gap = phi(ldm, c).value - c;
            const int sign = gap > 1e-9 ? 1 : (gap < -1e-9 ? -1 : prev_sign);
            if (prev_sign != 0 && sign != prev_sign) ++sign_changes;
            prev_sign = sign;
        }
        CHECK(sign_changes <= 1);
    }
}

TEST_CASE("lambda star lower bound with pqd equality") {
    for (double gamma : {0.5, 1.0}) {
        for (double ap : {0.25, 0.9}) {
            for (double rho : {0.5, 1.5, 3.0}) {
                const double bound = rho > 1.0
                                         ? gamma * std::pow(1.0 - std::pow(ap, rho / (rho - 1.0)),
                                                            rho - 1.0)
                                         : gamma;
                const double ls = lambda_star(pqd_ldm(gamma, ap, rho)).value;
                CHECK(ls + 1e-6 >= bound);
                CHECK(ls == doctest::Approx(bound).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("phi of a grid-backed curve matches the generating closed form") {
    const auto ys = linspace(0.0, 4.0, 2001);
    const LdmFunction ldm = curve_ldm(make_pqd_curve(1.0, 0.5, 2.0, ys));
    for (double lam : {0.1, 0.75, 3.0}) {
        CHECK(phi(ldm, lam).value ==
              doctest::Approx(phi_pqd_closed(1.0, 0.5, 2.0, lam)).epsilon(1e-5));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "lastexit/boundary.hpp"
#include "lastexit/covariance.hpp"
#include "lastexit/errors.hpp"
#include "lastexit/normalize.hpp"

using namespace lastexit;

namespace {
const Boundary kPoly2 = builtin_polynomial(2);
const Boundary kSexp = builtin_stretched_exponential(0.5);
}  // namespace

TEST_CASE("Pickands constant: exact values and the user override") {
    CHECK(pickands_constant(1.0) == 1.0);
    CHECK(pickands_constant(2.0) == doctest::Approx(0.5641895835477563).epsilon(1e-15));
    CHECK(pickands_constant(1.5, 0.8) == 0.8);
    CHECK_THROWS_AS(pickands_constant(1.5), UnsupportedError);
    CHECK_THROWS_AS(pickands_constant(0.7), UnsupportedError);
}

TEST_CASE("critical level for the standardized process") {
    // f(x) = x^d gives gamma^2 = -2 ln(eps)/d - 2 ln d in closed form
    double g = solve_gamma(kPoly2, 1e-3);
    CHECK(g == doctest::Approx(2.3497789082937666).epsilon(1e-14));
    CHECK(g * g == doctest::Approx(-std::log(1e-3) - 2.0 * std::log(2.0)).epsilon(1e-14));

    CHECK(solve_gamma(kSexp, 1e-3) == doctest::Approx(2.2916334412274626).epsilon(1e-14));

    CHECK_THROWS_AS(solve_gamma(kPoly2, 0.3), ConfigError);
    CHECK_THROWS_AS(solve_gamma(kPoly2, -1.0), ConfigError);
}

TEST_CASE("level equation round trip f(tau0) eps_v = gamma") {
    struct Probe {
        CovarianceModel model;
        Boundary b;
        double eps;
    };
    std::vector<Probe> probes;
    probes.push_back({CovarianceModel::ornstein_uhlenbeck(), kPoly2, 1e-3});
    probes.push_back({CovarianceModel::gaussian_kernel(2.0), builtin_stretched_exponential(1.0 / 3.0), 1e-4});
    probes.push_back({CovarianceModel::power_exponential(1.0, 4.0, 3.0), builtin_polynomial(3), 1e-5});
    for (const Probe& p : probes) {
        NormalizingConstants nc = constants(p.model, p.b, p.eps);
        CHECK(p.b.f(nc.tau0) * nc.eps_v == doctest::Approx(nc.gamma).epsilon(1e-10));
    }
}

TEST_CASE("constants for the unit-variance exponential kernel and a square boundary") {
    NormalizingConstants nc = constants(CovarianceModel::ornstein_uhlenbeck(), kPoly2, 1e-3);
    CHECK(nc.eps == 1e-3);
    CHECK(nc.eps_v == 1e-3);
    CHECK(nc.gamma == doctest::Approx(2.3497789082937666).epsilon(1e-14));
    CHECK(nc.tau0 == doctest::Approx(48.47451813369336).epsilon(1e-14));
    CHECK(nc.A == doctest::Approx(46.59943420387815).epsilon(1e-14));
    CHECK(nc.B == doctest::Approx(4.389646042488094).epsilon(1e-14));
    CHECK(nc.c == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(nc.pickands_constant == 1.0);
}

TEST_CASE("variance only enters through eps / v") {
    NormalizingConstants scaled = constants(CovarianceModel::power_exponential(1.0, 1.0, 2.0), kPoly2, 1e-3);
    NormalizingConstants unit = constants(CovarianceModel::ornstein_uhlenbeck(), kPoly2, 5e-4);
    CHECK(scaled.eps_v == unit.eps_v);
    CHECK(scaled.gamma == doctest::Approx(unit.gamma).epsilon(1e-14));
    CHECK(scaled.tau0 == doctest::Approx(unit.tau0).epsilon(1e-14));
    CHECK(scaled.A == doctest::Approx(unit.A).epsilon(1e-14));
    CHECK(scaled.B == doctest::Approx(unit.B).epsilon(1e-14));
    CHECK(scaled.c == doctest::Approx(unit.c).epsilon(1e-14));
}

TEST_CASE("direct constants match standardize-then-map-back") {
    // X has correlation e^{-4|t|}; X(s/4) is the unit-rate process, and the
    // boundary seen in rescaled time is f(s/4). Time quantities map by 1/4,
    // gamma is invariant, and the Gumbel rate c picks up the factor 4 (it is
    // a per-unit-time rate).
    const double q14 = 4.0;  // Q^{1/alpha}
    NormalizingConstants direct = constants(CovarianceModel::power_exponential(1.0, 4.0, 1.0), kPoly2, 1e-3);
    Boundary rescaled = user_defined(
        [](double s) { return s * s / 16.0; }, [](double s) { return s / 8.0; },
        [](double) { return 1.0 / 8.0; }, [](double y) { return 4.0 * std::sqrt(y); },
        [](double y) { return 2.0 / std::sqrt(y); }, 1.0, -0.5, -0.5, 4.0, 0.25, 1.0);
    NormalizingConstants std_route = constants(CovarianceModel::ornstein_uhlenbeck(), rescaled, 1e-3);
    CHECK(direct.gamma == doctest::Approx(std_route.gamma).epsilon(1e-10));
    CHECK(direct.tau0 == doctest::Approx(std_route.tau0 / q14).epsilon(1e-10));
    CHECK(direct.A == doctest::Approx(std_route.A / q14).epsilon(1e-10));
    CHECK(direct.B == doctest::Approx(std_route.B / q14).epsilon(1e-10));
    CHECK(direct.c == doctest::Approx(std_route.c * q14).epsilon(1e-10));
}

TEST_CASE("constants validation") {
    CHECK_THROWS_AS(constants(CovarianceModel::ornstein_uhlenbeck(), kPoly2, 0.0), ConfigError);
    CHECK_THROWS_AS(constants(CovarianceModel::ornstein_uhlenbeck(), kPoly2, 0.5), ConfigError);
    CHECK_THROWS_AS(constants(CovarianceModel::power_exponential(1.5, 1.0), kPoly2, 1e-3), UnsupportedError);
    NormalizingConstants nc = constants(CovarianceModel::power_exponential(1.5, 1.0), kPoly2, 1e-3, 0.8);
    CHECK(nc.pickands_constant == 0.8);
}

TEST_CASE("slow-growth asymptotics of gamma") {
    GammaAsymptotic un = gamma_asymptotic(kSexp, 1e-6, false);
    CHECK(!un.order_only);
    // lambda = 1/2: sqrt(2 ln(-ln eps)); coincides with solve_gamma at 1e-3
    CHECK(un.value == doctest::Approx(2.2916334412274626).epsilon(1e-13));

    GammaAsymptotic re = gamma_asymptotic(kSexp, 1e-3, true);
    CHECK(!re.order_only);
    CHECK(re.value == doctest::Approx(solve_gamma(kSexp, 1e-3)).epsilon(1e-13));

    GammaAsymptotic po = gamma_asymptotic(kPoly2, 1e-4, false);
    CHECK(po.order_only);
    CHECK(po.value == doctest::Approx(std::sqrt(-std::log(1e-4))).epsilon(1e-13));

    // refined form needs the curvature prefactor; reject when it is unknown
    Boundary nameless = user_defined(
        [](double x) { return std::exp(std::sqrt(x)); },
        [](double x) { return 0.5 / std::sqrt(x) * std::exp(std::sqrt(x)); },
        [](double x) {
            double s = std::sqrt(x);
            return (0.25 / x - 0.25 / (x * s)) * std::exp(s);
        },
        [](double y) { double l = std::log(y); return l * l; },
        [](double y) { return 2.0 * std::log(y) / y; }, 0.5, -1.0, 0.0, 1.0);
    CHECK_THROWS_AS(gamma_asymptotic(nameless, 1e-3, true), ConfigError);
    CHECK_NOTHROW(gamma_asymptotic(nameless, 1e-3, false));
}

TEST_CASE("generic constants approach the closed-form expansions") {
    const std::vector<double> ladder{1e-3, 1e-5, 1e-7, 1e-9};

    std::vector<double> gap_b_poly, gap_a_poly, gap_b_se, gap_a_se;
    for (double e : ladder) {
        NormalizingConstants nc = constants(CovarianceModel::ornstein_uhlenbeck(), kPoly2, e);
        ClosedFormConstants cf = polynomial_constants_closed_form(2.0, 1.0, e);
        gap_b_poly.push_back(std::fabs(cf.B / nc.B - 1.0));
        gap_a_poly.push_back(std::fabs(cf.A / nc.A - 1.0));

        NormalizingConstants ns = constants(CovarianceModel::ornstein_uhlenbeck(), kSexp, e);
        ClosedFormConstants cs = stretched_exp_constants_closed_form(0.5, 1.0, e);
        gap_b_se.push_back(std::fabs(cs.B / ns.B - 1.0));
        gap_a_se.push_back(std::fabs(cs.A / ns.A - 1.0));
    }
    for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
        CHECK(gap_b_poly[i + 1] < gap_b_poly[i]);
        CHECK(gap_a_poly[i + 1] < gap_a_poly[i]);
        CHECK(gap_b_se[i + 1] < gap_b_se[i]);
        CHECK(gap_a_se[i + 1] < gap_a_se[i]);
    }
    CHECK(gap_b_poly[0] == doctest::Approx(0.1546).epsilon(1e-3));
    CHECK(gap_a_poly[0] == doctest::Approx(0.006483).epsilon(1e-3));

    ClosedFormConstants cs3 = stretched_exp_constants_closed_form(0.5, 1.0, 1e-3);
    CHECK(cs3.B == doctest::Approx(3.574249916581999).epsilon(1e-12));

    CHECK_THROWS_AS(polynomial_constants_closed_form(1.0, 1.0, 1e-3), ConfigError);
    CHECK_THROWS_AS(stretched_exp_constants_closed_form(1.2, 1.0, 1e-3), ConfigError);
}

TEST_CASE("shift expansion residuals: exact square-boundary identity") {
    // For f(x) = x^2 with alpha = 1 the residual telescopes to
    // (kappa ln g + R)^2 / (4 g^2) with kappa = -1/2, g = solve_gamma.
    auto pts = check_lemma_R(kPoly2, 1.0, {1e-3, 1e-5}, {-1.0, 0.0, 1.0});
    REQUIRE(pts.size() == 6);
    for (const LemmaRPoint& p : pts) {
        double g = solve_gamma(kPoly2, p.eps);
        double u = -0.5 * std::log(g) + p.r;
        CHECK(p.residual == doctest::Approx(u * u / (4.0 * g * g)).epsilon(1e-9));
        CHECK(p.regime_ok == (std::fabs(p.r) <= 0.5 * std::log(g)));
    }
}

TEST_CASE("shift expansion residuals: frozen values and ladder decay") {
    auto pts = check_lemma_R(kPoly2, 1.0, {1e-3}, {-1.0, 0.0, 1.0});
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].residual == doctest::Approx(0.09222140066962611).epsilon(1e-12));
    CHECK(pts[1].residual == doctest::Approx(0.00826168105293229).epsilon(1e-12));
    CHECK(pts[2].residual == doctest::Approx(0.014857705185592339).epsilon(1e-12));
    CHECK_FALSE(pts[0].regime_ok);
    CHECK(pts[1].regime_ok);
    CHECK_FALSE(pts[2].regime_ok);

    // residual -> 0 along the ladder, each offset separately
    const std::vector<double> ladder{1e-4, 1e-6, 1e-8, 1e-10};
    for (double r : {-1.0, 0.0, 1.0}) {
        auto run = check_lemma_R(kPoly2, 1.0, ladder, {r});
        for (std::size_t i = 0; i + 1 < run.size(); ++i)
            CHECK(run[i + 1].residual < run[i].residual);
    }
}

TEST_CASE("shift expansion validation") {
    CHECK_THROWS_AS(check_lemma_R(kPoly2, 1.0, {}, {0.0}), ConfigError);
    CHECK_THROWS_AS(check_lemma_R(kPoly2, 1.0, {1e-5, 1e-3}, {0.0}), ConfigError);
    // large eps pushes A + B R below the validity ray
    CHECK_THROWS_AS(check_lemma_R(kSexp, 1.0, {0.45}, {0.0}), ConfigError);
}

TEST_CASE("discrete-sum law matches its closed form") {
    const double eps = 1e-3;
    const double theta = 48.47451813369336;
    const double a = lemma_prop_default_spacing(kPoly2, eps, theta);
    CHECK(a == doctest::Approx(0.04389646042488094).epsilon(1e-12));
    // calibration identity: f(theta) f'(theta) a eps^2 = 0.01
    CHECK(kPoly2.f(theta) * kPoly2.df(theta) * a * eps * eps ==
          doctest::Approx(0.01).epsilon(1e-12));

    LemmaPropResult r = verify_lemma_prop(kPoly2, 1.0, eps, a, 0.0, 0.0, theta);
    CHECK(r.brute_sum == doctest::Approx(13.8467679426701).epsilon(1e-10));
    CHECK(r.closed_form == doctest::Approx(14.861306696064451).epsilon(1e-10));
    CHECK(r.ratio == doctest::Approx(0.9317328701881228).epsilon(1e-10));
    CHECK(r.ratio > 0.8);
    CHECK(r.ratio < 1.25);
    CHECK(r.gamma == doctest::Approx(2.3497789082937666).epsilon(1e-12));

    // halving the spacing doubles the Riemann sum but leaves the ratio alone
    LemmaPropResult h = verify_lemma_prop(kPoly2, 1.0, eps, a / 2.0, 0.0, 0.0, theta);
    CHECK(h.brute_sum / r.brute_sum == doctest::Approx(2.0).epsilon(0.01));

    // a bounded vertical offset moves the ratio by less than 5%
    const double c_off = 0.01 / (kPoly2.f(theta) * eps * eps);
    LemmaPropResult o = verify_lemma_prop(kPoly2, 1.0, eps, a, 0.0, c_off, theta);
    CHECK(std::fabs(o.ratio / r.ratio - 1.0) < 0.05);
}

TEST_CASE("discrete-sum law ratio approaches 1 along the ladder") {
    double prev = 0.0;
    for (double e : {1e-3, 1e-5, 1e-8}) {
        double g = solve_gamma(kPoly2, e);
        double theta = kPoly2.finv(g / e);
        double a = lemma_prop_default_spacing(kPoly2, e, theta);
        LemmaPropResult r = verify_lemma_prop(kPoly2, 1.0, e, a, 0.0, 0.0, theta);
        CHECK(std::fabs(r.ratio - 1.0) < std::fabs(prev - 1.0) + 1e-12);
        prev = r.ratio;
        if (e == 1e-8) CHECK(r.ratio == doctest::Approx(0.9778896514330421).epsilon(1e-10));
    }
}

TEST_CASE("discrete-sum law rejects out-of-regime inputs") {
    const double eps = 1e-3;
    const double theta = 48.47451813369336;
    const double a = 0.04389646042488094;
    // spacing comparable to theta
    CHECK_THROWS_AS(verify_lemma_prop(kPoly2, 1.0, eps, 5.0, 0.0, 0.0, theta),
                    VerificationError);
    // level far from gamma
    CHECK_THROWS_AS(verify_lemma_prop(kPoly2, 1.0, eps, a, 0.0, 0.0, 40.0),
                    VerificationError);
    // vertical offset too large
    CHECK_THROWS_AS(verify_lemma_prop(kPoly2, 1.0, eps, a, 0.0, 50.0, theta),
                    VerificationError);
    // theta off the validity ray
    CHECK_THROWS_AS(verify_lemma_prop(kPoly2, 1.0, eps, a, 0.0, 0.0, 0.5), ConfigError);
    CHECK_THROWS_AS(lemma_prop_default_spacing(kPoly2, eps, theta, -1.0), ConfigError);
}

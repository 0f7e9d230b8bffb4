// Acceptance gate: nine independent checks covering the constants, the
// asymptotic expansions, the sampler, the end-to-end limit-law study, the
// comparison ordering, and determinism. Each check prints its measurements,
// then one [PASS]/[FAIL] verdict line; the process exits nonzero if any
// selected check fails. Tolerances are fixed here, not configurable: this
// binary is the contract, not a tool.
//
// Run all checks with no arguments, or a single one with --criterion <1..9>.
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <algorithm>
#include <string>
#include <vector>

#include "lastexit/boundary.hpp"
#include "lastexit/covariance.hpp"
#include "lastexit/kernels.hpp"
#include "lastexit/normalize.hpp"
#include "lastexit/sampler.hpp"
#include "lastexit/slepian.hpp"
#include "lastexit/stats.hpp"
#include "lastexit/study.hpp"

namespace {

using namespace lastexit;

bool verdict(int k, const char* name, bool pass) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", k, name);
    return pass;
}

// ---------------------------------------------------------------------------
// 1. Generic constants vs the closed-form expansions for both built-in
//    boundaries: relative gap in B below 5% at eps = 1e-3 and strictly
//    decreasing along the eps ladder. The closed forms drop terms of order
//    ln(-ln eps)/ln(eps), so the gap shrinks only logarithmically; the
//    decreasing legs hold, the 5% legs do not at desk scale. Measured gaps
//    are printed either way.
bool criterion1() {
    const CovarianceModel ou = CovarianceModel::ornstein_uhlenbeck();
    const std::vector<double> ladder{1e-3, 1e-5, 1e-7, 1e-9};
    bool pass = true;

    struct Case {
        const char* label;
        Boundary b;
        bool poly;
        double param;
    };
    const Case cases[] = {
        {"polynomial d=2", builtin_polynomial(2), true, 2.0},
        {"stretched-exp q=1/2", builtin_stretched_exponential(0.5), false, 0.5},
    };
    for (const Case& cs : cases) {
        std::vector<double> gaps;
        for (double e : ladder) {
            NormalizingConstants nc = constants(ou, cs.b, e);
            ClosedFormConstants cf = cs.poly
                ? polynomial_constants_closed_form(cs.param, 1.0, e)
                : stretched_exp_constants_closed_form(cs.param, 1.0, e);
            gaps.push_back(std::fabs(cf.B / nc.B - 1.0));
        }
        bool small_at_start = gaps.front() < 0.05;
        bool decreasing = true;
        for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
            if (!(gaps[i + 1] < gaps[i])) decreasing = false;
        std::printf("  %s: B gap at eps=1e-3 is %.4f (required < 0.05): %s\n", cs.label,
                    gaps.front(), small_at_start ? "ok" : "FAILED");
        std::printf("  %s: B gap ladder", cs.label);
        for (double g : gaps) std::printf(" %.4f", g);
        std::printf(" strictly decreasing: %s\n", decreasing ? "ok" : "FAILED");
        pass = pass && small_at_start && decreasing;
    }
    return verdict(1, "constants vs closed-form expansions", pass);
}

// ---------------------------------------------------------------------------
// 2. Critical-level solvers: solve_gamma for the polynomial boundary d=2 at
//    eps=1e-3 matches sqrt(5.5215) within 1e-3, and the refined slow-growth
//    formula for q=1/2 reproduces solve_gamma along the ladder (for this
//    boundary the two are algebraically identical, so the gap must sit at
//    rounding level everywhere).
bool criterion2() {
    const Boundary poly2 = builtin_polynomial(2);
    const Boundary sexp = builtin_stretched_exponential(0.5);
    bool pass = true;

    const double g = solve_gamma(poly2, 1e-3);
    const double target = std::sqrt(5.5215);
    std::printf("  solve_gamma(d=2, 1e-3) = %.10f vs %.10f, |diff| = %.3g (tol 1e-3)\n", g,
                target, std::fabs(g - target));
    pass = pass && std::fabs(g - target) <= 1e-3;

    for (double e : {1e-3, 1e-5, 1e-7, 1e-9}) {
        const double exact = solve_gamma(sexp, e);
        const double refined = gamma_asymptotic(sexp, e, true).value;
        const double gap = std::fabs(refined - exact);
        std::printf("  refined gamma gap (q=1/2, eps=%.0e) = %.3g (tol 1e-10)\n", e, gap);
        pass = pass && gap < 1e-10;
    }
    return verdict(2, "critical-level solvers", pass);
}

// ---------------------------------------------------------------------------
// 3. Discrete-sum law: brute-force sum over the shifted grid vs its closed
//    form, for both built-in boundaries and both exact local exponents. The
//    ratio at the smallest ladder eps must lie in [0.9, 1.1] and |ratio - 1|
//    must decrease along the ladder (one non-monotone step allowed).
bool criterion3() {
    const std::vector<double> ladder{1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    bool pass = true;

    struct Case {
        const char* label;
        Boundary b;
        double alpha;
    };
    const Case cases[] = {
        {"polynomial d=2, alpha=1", builtin_polynomial(2), 1.0},
        {"polynomial d=2, alpha=2", builtin_polynomial(2), 2.0},
        {"stretched-exp q=1/3, alpha=1", builtin_stretched_exponential(1.0 / 3.0), 1.0},
        {"stretched-exp q=1/3, alpha=2", builtin_stretched_exponential(1.0 / 3.0), 2.0},
    };
    for (const Case& cs : cases) {
        std::vector<double> ratios;
        for (double e : ladder) {
            const double g = solve_gamma(cs.b, e);
            const double theta = cs.b.finv(g / e);
            const double a = lemma_prop_default_spacing(cs.b, e, theta);
            LemmaPropResult r = verify_lemma_prop(cs.b, cs.alpha, e, a, 0.0, 0.0, theta);
            ratios.push_back(r.ratio);
        }
        int increases = 0;
        for (std::size_t i = 0; i + 1 < ratios.size(); ++i)
            if (std::fabs(ratios[i + 1] - 1.0) > std::fabs(ratios[i] - 1.0) + 1e-12) ++increases;
        const double last = ratios.back();
        const bool in_band = last >= 0.9 && last <= 1.1;
        const bool monotone = increases <= 1;
        std::printf("  %s: ratios", cs.label);
        for (double r : ratios) std::printf(" %.4f", r);
        std::printf("; final in [0.9,1.1]: %s, non-monotone steps %d (max 1): %s\n",
                    in_band ? "ok" : "FAILED", increases, monotone ? "ok" : "FAILED");
        pass = pass && in_band && monotone;
    }
    return verdict(3, "discrete-sum law vs closed form", pass);
}

// ---------------------------------------------------------------------------
// 4. Shift-expansion residuals |gamma (f(A + B R) eps - gamma
//    - (2/alpha + beta - 2) ln(gamma)/gamma - R/gamma)| strictly decreasing
//    along the eps ladder for R in {-1, 0, 1} (polynomial d=2, alpha=1; the
//    ladder starts at 1e-4 so that gamma is past the residual's peak at
//    gamma = e).
bool criterion4() {
    const Boundary poly2 = builtin_polynomial(2);
    const std::vector<double> ladder{1e-4, 1e-6, 1e-8, 1e-10};
    bool pass = true;
    for (double r : {-1.0, 0.0, 1.0}) {
        std::vector<LemmaRPoint> pts = check_lemma_R(poly2, 1.0, ladder, {r});
        std::printf("  R=%+.0f residuals", r);
        bool decreasing = true;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            std::printf(" %.6g", pts[i].residual);
            if (i > 0 && !(pts[i].residual < pts[i - 1].residual)) decreasing = false;
        }
        std::printf(" strictly decreasing: %s\n", decreasing ? "ok" : "FAILED");
        pass = pass && decreasing;
    }
    return verdict(4, "shift-expansion residuals", pass);
}

// ---------------------------------------------------------------------------
// 5. Exceedance probability formula, Monte Carlo: exact paths on [0, 10] at
//    step 0.002 (5001 nodes), one million replicates, shared across the three
//    levels. The empirical/formula ratio at x=3.5 must lie in [0.8, 1.25] and
//    the ratio at x=4.0 must be closer to 1 than at x=3.0.
bool criterion5() {
    const CovarianceModel ou = CovarianceModel::ornstein_uhlenbeck();
    const std::size_t n = 5001, reps = 1000000;
    const double step = 0.002, t = 10.0;
    const std::uint64_t seed = 1;
    PathSampler sampler(ou, n, step);

    double ratio[3] = {0, 0, 0};
    const double levels[3] = {3.0, 3.5, 4.0};
    for (int i = 0; i < 3; ++i) {
        const std::uint64_t hits = batch_exceedance(sampler, seed, reps, levels[i], Exec::OpenMP);
        const double p = double(hits) / double(reps);
        const double formula = pp_tail(ou, levels[i], t).value;
        const double se = std::sqrt(p * (1.0 - p) / double(reps));
        ratio[i] = p / formula;
        std::printf("  x=%.1f: empirical %.6g (se %.2g), formula %.6g, ratio %.4f\n", levels[i],
                    p, se, formula, ratio[i]);
    }
    const bool band = ratio[1] >= 0.8 && ratio[1] <= 1.25;
    const bool improves = std::fabs(ratio[2] - 1.0) < std::fabs(ratio[0] - 1.0);
    std::printf("  ratio at x=3.5 in [0.8, 1.25]: %s; |ratio-1| smaller at x=4 than x=3: %s\n",
                band ? "ok" : "FAILED", improves ? "ok" : "FAILED");
    return verdict(5, "exceedance formula Monte Carlo", band && improves);
}

// ---------------------------------------------------------------------------
// 6. Sampler exactness: 64-node grid, 1e5 replicates; every empirical
//    covariance entry within 4 standard errors of the analytic target and
//    every marginal variance within 3 standard errors of v^2.
bool criterion6() {
    const CovarianceModel ou = CovarianceModel::ornstein_uhlenbeck();
    const std::size_t n = 64, reps = 100000;
    const double step = 0.05;
    const std::uint64_t seed = 1;
    PathSampler sampler(ou, n, step);
    CovMoments m = batch_covariance(sampler, seed, reps, Exec::OpenMP);

    double max_z_off = 0.0, max_z_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double lag = double(i > j ? i - j : j - i) * step;
            const double z =
                std::fabs(m.second_moment[i * n + j] - evaluate(ou, lag)) / m.standard_error(i, j);
            if (i == j)
                max_z_diag = std::max(max_z_diag, z);
            else
                max_z_off = std::max(max_z_off, z);
        }
    }
    std::printf("  max |z| over covariance entries: %.3f (bound 4)\n", max_z_off);
    std::printf("  max |z| over marginal variances: %.3f (bound 3)\n", max_z_diag);
    const bool pass = max_z_off <= 4.0 && max_z_diag <= 3.0;
    return verdict(6, "sampler covariance exactness", pass);
}

// ---------------------------------------------------------------------------
// 7. End-to-end limit-law trend: studies at eps in {0.1, 0.05, 0.02} with
//    2e4 replicates each. (a) censored fraction below 0.1% at every eps;
//    (b) KS distance non-increasing along the ladder within a 2/sqrt(n)
//    noise band; (c) at the smallest eps the empirical median of (T - A)/B
//    within +-0.6 of the law's median -ln(ln 2 / c); (d) at the smallest eps
//    the empirical 10%-90% band overlaps the theoretical band with relative
//    width error below 50%. Per-eps diagnostics are printed for all legs.
bool criterion7() {
    const CovarianceModel ou = CovarianceModel::ornstein_uhlenbeck();
    const Boundary poly2 = builtin_polynomial(2);
    const std::vector<double> ladder{0.1, 0.05, 0.02};
    const std::size_t reps = 20000;
    const std::uint64_t seed = 1;
    const double noise_band = 2.0 / std::sqrt(double(reps));

    bool censoring_ok = true, ks_trend_ok = true;
    double prev_d = 0.0;
    double med_err = 0.0, width_err = 0.0;
    bool overlap = false;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        ExitTimeStudy st = run_study(ou, poly2, ladder[k], reps, GridPolicy{}, seed);
        const GumbelLaw law{st.constants.c};
        const double d = ks_distance(st.normalized, law);
        const double cens_frac = double(st.censored_count) / double(reps);

        std::vector<double> sorted = st.normalized;
        std::sort(sorted.begin(), sorted.end());
        const double med = empirical_quantile(sorted, 0.5);
        const double e10 = empirical_quantile(sorted, 0.1);
        const double e90 = empirical_quantile(sorted, 0.9);
        const double t10 = gumbel_quantile(law, 0.1);
        const double t90 = gumbel_quantile(law, 0.9);

        std::printf("  eps=%.2f: D=%.5f censored=%zu/%zu no-exit=%zu median=%.4f "
                    "band=[%.4f, %.4f] theory=[%.4f, %.4f]\n",
                    ladder[k], d, st.censored_count, reps, st.no_exit_count, med, e10, e90, t10,
                    t90);

        if (cens_frac >= 1e-3 || !st.valid) censoring_ok = false;
        if (k > 0 && d > prev_d + noise_band) ks_trend_ok = false;
        prev_d = d;
        if (k + 1 == ladder.size()) {
            med_err = std::fabs(med - gumbel_quantile(law, 0.5));
            width_err = std::fabs((e90 - e10) - (t90 - t10)) / (t90 - t10);
            overlap = e10 <= t90 && t10 <= e90;
        }
    }
    std::printf("  censored fraction < 0.1%% at every eps: %s\n",
                censoring_ok ? "ok" : "FAILED");
    std::printf("  KS distance non-increasing (band %.4f): %s\n", noise_band,
                ks_trend_ok ? "ok" : "FAILED");
    std::printf("  median error at smallest eps: %.4f (bound 0.6): %s\n", med_err,
                med_err <= 0.6 ? "ok" : "FAILED");
    std::printf("  decile band overlap: %s, relative width error %.4f (bound 0.5): %s\n",
                overlap ? "yes" : "NO", width_err,
                (overlap && width_err < 0.5) ? "ok" : "FAILED");
    const bool pass = censoring_ok && ks_trend_ok && med_err <= 0.6 && overlap && width_err < 0.5;
    return verdict(7, "limit-law trend study", pass);
}

// ---------------------------------------------------------------------------
// 8. Comparison ordering: the union-exceedance probability of the true
//    process over two separated intervals dominates the surrogate with
//    cross-interval correlation inflated to delta^2, for delta^2 in
//    {0.05, 0.1}, level 2.0, 1e5 replicates. The interval gap is chosen so
//    the domination hypothesis delta^2 >= max cross-correlation holds.
bool criterion8() {
    const CovarianceModel ou = CovarianceModel::ornstein_uhlenbeck();
    const std::size_t reps = 100000;
    const std::uint64_t seed = 11;
    bool pass = true;
    for (double d2 : {0.05, 0.1}) {
        SlepianReport r = slepian_check(ou, {0.0, 1.0}, {5.0, 6.0}, 2.0, d2, 0.01, reps, seed);
        std::printf("  delta^2=%.2f: p_original=%.5f p_inflated=%.5f se=%.5f "
                    "max_cross_corr=%.4f hypothesis=%s ordering=%s\n",
                    d2, r.p_original, r.p_inflated, r.se_combined, r.max_cross_corr,
                    r.hypothesis_ok ? "ok" : "FAILED", r.passed ? "ok" : "FAILED");
        pass = pass && r.hypothesis_ok && r.passed;
    }
    return verdict(8, "comparison ordering", pass);
}

// ---------------------------------------------------------------------------
// 9. Determinism: identical seeds give byte-identical primary outputs. The
//    deterministic analytic path is rerun and compared as serialized text;
//    each Monte Carlo generator is rerun at reduced replicate counts and
//    compared bitwise, in both execution modes. Bitwise agreement between
//    the threaded and serial kernels is part of the contract.
bool criterion9() {
    const CovarianceModel ou = CovarianceModel::ornstein_uhlenbeck();
    const Boundary poly2 = builtin_polynomial(2);
    bool pass = true;

    auto constants_line = [&]() {
        NormalizingConstants nc = constants(ou, poly2, 1e-3);
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g", nc.gamma, nc.tau0, nc.A,
                      nc.B, nc.c);
        return std::string(buf);
    };
    const bool analytic_ok = constants_line() == constants_line();
    std::printf("  analytic constants rerun identical: %s\n", analytic_ok ? "ok" : "FAILED");
    pass = pass && analytic_ok;

    {
        PathSampler sampler(ou, 501, 0.002);
        const std::uint64_t a = batch_exceedance(sampler, 3, 20000, 3.0, Exec::OpenMP);
        const std::uint64_t b = batch_exceedance(sampler, 3, 20000, 3.0, Exec::OpenMP);
        const std::uint64_t c = batch_exceedance(sampler, 3, 20000, 3.0, Exec::Serial);
        std::printf("  exceedance counts rerun/threaded/serial: %" PRIu64 "/%" PRIu64 "/%" PRIu64
                    ": %s\n",
                    a, b, c, (a == b && b == c) ? "ok" : "FAILED");
        pass = pass && a == b && b == c;
    }
    {
        PathSampler sampler(ou, 64, 0.05);
        CovMoments a = batch_covariance(sampler, 9, 5000, Exec::OpenMP);
        CovMoments b = batch_covariance(sampler, 9, 5000, Exec::Serial);
        const bool same =
            std::memcmp(a.second_moment.data(), b.second_moment.data(),
                        a.second_moment.size() * sizeof(double)) == 0 &&
            std::memcmp(a.product_square_moment.data(), b.product_square_moment.data(),
                        a.product_square_moment.size() * sizeof(double)) == 0;
        std::printf("  covariance moments threaded vs serial bitwise: %s\n",
                    same ? "ok" : "FAILED");
        pass = pass && same;
    }
    {
        ExitTimeStudy a = run_study(ou, poly2, 0.1, 2000, GridPolicy{}, 7, Exec::OpenMP);
        ExitTimeStudy b = run_study(ou, poly2, 0.1, 2000, GridPolicy{}, 7, Exec::OpenMP);
        ExitTimeStudy c = run_study(ou, poly2, 0.1, 2000, GridPolicy{}, 7, Exec::Serial);
        auto same_study = [](const ExitTimeStudy& x, const ExitTimeStudy& y) {
            return x.raw_exit_times.size() == y.raw_exit_times.size() &&
                   std::memcmp(x.raw_exit_times.data(), y.raw_exit_times.data(),
                               x.raw_exit_times.size() * sizeof(double)) == 0 &&
                   std::memcmp(x.normalized.data(), y.normalized.data(),
                               x.normalized.size() * sizeof(double)) == 0 &&
                   x.censored_count == y.censored_count && x.no_exit_count == y.no_exit_count;
        };
        const nlohmann::json echo = {{"seed", 7}};
        const bool same_csv = study_csv(a, echo) == study_csv(b, echo);
        std::printf("  study rerun bitwise: %s; threaded vs serial bitwise: %s; CSV bytes: %s\n",
                    same_study(a, b) ? "ok" : "FAILED", same_study(a, c) ? "ok" : "FAILED",
                    same_csv ? "ok" : "FAILED");
        pass = pass && same_study(a, b) && same_study(a, c) && same_csv;
    }
    {
        SlepianReport a = slepian_check(ou, {0.0, 1.0}, {5.0, 6.0}, 2.0, 0.05, 0.01, 5000, 11);
        SlepianReport b = slepian_check(ou, {0.0, 1.0}, {5.0, 6.0}, 2.0, 0.05, 0.01, 5000, 11);
        const bool same = std::memcmp(&a.p_original, &b.p_original, sizeof(double)) == 0 &&
                          std::memcmp(&a.p_inflated, &b.p_inflated, sizeof(double)) == 0;
        std::printf("  ordering check rerun bitwise: %s\n", same ? "ok" : "FAILED");
        pass = pass && same;
    }
    return verdict(9, "seeded determinism", pass);
}

}  // namespace

int main(int argc, char** argv) {
    int which = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            which = std::atoi(argv[++i]);
            if (which < 1 || which > 9) {
                std::fprintf(stderr, "criterion must be 1..9\n");
                return 2;
            }
        } else {
            std::fprintf(stderr, "usage: %s [--criterion <1..9>]\n", argv[0]);
            return 2;
        }
    }
    bool (*checks[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                          criterion6, criterion7, criterion8, criterion9};
    int failures = 0;
    try {
        for (int k = 1; k <= 9; ++k) {
            if (which != 0 && which != k) continue;
            if (!checks[k - 1]()) ++failures;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return failures == 0 ? 0 : 1;
}

// Normalizing constants of the Gumbel limit for the last exit time: the
// critical level gamma, centering time tau0, shift A, scale B, and rate c,
// under the fixed convention that every o(1) term in their defining
// relations is set to zero. Also the closed-form expansions for the two
// built-in boundaries and the numerical verifiers for the gamma asymptotics,
// the shift expansion, and the discrete-sum law.
#pragma once

#include <vector>

#include "lastexit/boundary.hpp"
#include "lastexit/covariance.hpp"

namespace lastexit {

struct NormalizingConstants {
    double eps = 0.0;    // drift parameter
    double eps_v = 0.0;  // eps / v
    double gamma = 0.0;  // critical level, gamma^2 = 2 ln[(f^-1)'(1/eps_v)/eps_v] + (2/alpha) ln Q
    double tau0 = 0.0;   // centering time f^-1(v gamma / eps)
    double A = 0.0;      // shift, tau0 + B (2/alpha + beta - 2) ln gamma
    double B = 0.0;      // scale, 1 / (f'(tau0) eps_v gamma)
    double c = 0.0;      // Gumbel rate, Q^{1/alpha} H_alpha / sqrt(2 pi)
    double pickands_constant = 0.0;  // H_alpha used for c
};

// H_alpha: exact for alpha in {1, 2}; otherwise must be supplied by the
// caller (user_h > 0), since no general estimator is provided.
double pickands_constant(double alpha, double user_h = 0.0);

// Critical level for the standardized process (v = Q = 1):
// gamma = sqrt(2 ln[(f^-1)'(1/eps)/eps]). Throws ConfigError when the log
// argument is <= 1 (eps too large to enter the asymptotic regime).
double solve_gamma(const Boundary& b, double eps);

struct GammaAsymptotic {
    double value = 0.0;
    bool order_only = false;  // lambda = 1: value is sqrt(-ln eps), order only
};

// Slow-growth asymptotics of gamma. For lambda < 1 the unrefined form is
// sqrt((2 lambda/(1-lambda)) ln(-ln eps)); the refined form adds the
// constant terms and needs the curvature prefactor nu. For lambda = 1 only
// the order sqrt(-ln eps) is returned, flagged order_only.
GammaAsymptotic gamma_asymptotic(const Boundary& b, double eps, bool refined);

// All constants for a covariance model, boundary, and drift. Standardizing
// the process first and mapping times back by Q^{-1/alpha} gives the same
// values; the direct formulas below are that computation in closed form.
NormalizingConstants constants(const CovarianceModel& model, const Boundary& b, double eps,
                               double user_pickands = 0.0);

struct ClosedFormConstants {
    double A = 0.0;
    double B = 0.0;
};

// Explicit expansions of (A, B) for f(x) = x^d, standardized process,
// with every o(1) dropped.
ClosedFormConstants polynomial_constants_closed_form(double d, double alpha, double eps);

// Explicit expansions of (A, B) for f(x) = exp(x^q), standardized process.
ClosedFormConstants stretched_exp_constants_closed_form(double q, double alpha, double eps);

struct LemmaRPoint {
    double eps = 0.0;
    double r = 0.0;         // offset R in the expansion of f(A + B R) eps
    double residual = 0.0;  // |gamma (f(A+BR) eps - gamma - kappa ln(gamma)/gamma - R/gamma)|
    bool regime_ok = false; // |R| <= ln(gamma)/2, the regime the expansion assumes
};

// Residuals of the shift expansion f(A + B R) eps = gamma
// + (2/alpha + beta - 2) ln(gamma)/gamma + R/gamma + o(1/gamma), evaluated
// for the standardized process over an eps ladder. The expansion claims the
// residual -> 0 as eps -> 0. Throws ConfigError if A + B R leaves the
// boundary's validity ray.
std::vector<LemmaRPoint> check_lemma_R(const Boundary& b, double alpha,
                                       const std::vector<double>& eps_ladder,
                                       const std::vector<double>& r_values);

struct LemmaPropResult {
    double brute_sum = 0.0;    // truncated sum of [f(a i + b_off) eps + c_off eps]^{2/alpha-1} e^{-z^2/2}
    double closed_form = 0.0;  // (e^{gamma^2/2}/a) (f(theta) eps)^{2/alpha+beta-2} e^{-(f(theta) eps)^2/2}
    double ratio = 0.0;        // brute_sum / closed_form
    double gamma = 0.0;
    double theta = 0.0;
    double a = 0.0;
    // hypothesis diagnostics (thresholds in parentheses)
    double fprime_ratio_lo = 0.0;  // f'(theta - a)/f'(theta)  (>= 0.9)
    double fprime_ratio_hi = 0.0;  // f'(theta + a)/f'(theta)  (<= 1.1)
    double level_dev = 0.0;        // |f(theta) eps / gamma - 1|  (<= 0.1)
    double a_over_theta = 0.0;     // (< 0.1)
    double c_product = 0.0;        // f(theta) c_off eps^2  (< 0.1)
    double a_product = 0.0;        // f(theta) f'(theta) a eps^2  (< 0.1)
};

// Discrete-sum law: compares the brute-force sum against its closed-form
// equivalent for the standardized process. Hypothesis violations throw
// VerificationError naming the failed relation.
LemmaPropResult verify_lemma_prop(const Boundary& b, double alpha, double eps, double a,
                                  double b_off, double c_off, double theta);

// Spacing with f(theta) f'(theta) a eps^2 = target, the calibration used by
// the ladder checks (target defaults to 0.01).
double lemma_prop_default_spacing(const Boundary& b, double eps, double theta,
                                  double target = 0.01);

}  // namespace lastexit

// Distributional targets and goodness-of-fit: the Gumbel-type limit law
// exp(-c e^{-r}), its quantiles, the one-sample Kolmogorov-Smirnov distance,
// and the short-interval tail law for a stationary Gaussian maximum.
#pragma once

#include <vector>

#include "lastexit/covariance.hpp"

namespace lastexit {

struct GumbelLaw {
    double c = 1.0;  // rate constant, > 0
};

// exp(-c e^{-r}), evaluated through the log of the inner factor so extreme
// r neither overflows nor loses the 0/1 limits.
double gumbel_cdf(const GumbelLaw& law, double r);

// Inverse CDF: r = -ln(-ln(p)/c). Throws ConfigError for p outside (0, 1).
double gumbel_quantile(const GumbelLaw& law, double p);

// One-sample KS distance: max_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|).
// Samples may arrive unsorted; a sorted copy is used. Throws ConfigError on
// empty or non-finite input.
double ks_distance(const std::vector<double>& samples, const GumbelLaw& law);

struct PpTailResult {
    double value = 0.0;      // (Q^{1/alpha} H_alpha / sqrt(2 pi)) t (x/v)^{2/alpha-1} e^{-x^2/2v^2}
    bool value_ok = false;   // value < 0.5, the "right-hand side small" regime
    bool regime_ok = false;  // t * x^{2/alpha} >= 50, proxy for the joint limit
};

// Asymptotic P{max over [0, t] >= x} for a certified model. The regime
// checks are reported, not thrown, so callers can still compare the value
// against Monte Carlo outside the regime.
PpTailResult pp_tail(const CovarianceModel& model, double x, double t, double user_pickands = 0.0);

}  // namespace lastexit

#include "lastexit/stats.hpp"

#include <algorithm>
#include <cmath>

#include "lastexit/errors.hpp"
#include "lastexit/normalize.hpp"

namespace lastexit {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

double gumbel_cdf(const GumbelLaw& law, double r) {
    if (!(law.c > 0.0)) throw ConfigError("Gumbel rate constant must be positive");
    // inner = c e^{-r}; ln(inner) = ln c - r stays representable for any r
    const double log_inner = std::log(law.c) - r;
    if (log_inner > 709.0) return 0.0;  // exp would overflow; CDF underflows to 0
    return std::exp(-std::exp(log_inner));
}

double gumbel_quantile(const GumbelLaw& law, double p) {
    if (!(law.c > 0.0)) throw ConfigError("Gumbel rate constant must be positive");
    if (!(p > 0.0) || !(p < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
    return -std::log(-std::log(p) / law.c);
}

double ks_distance(const std::vector<double>& samples, const GumbelLaw& law) {
    if (samples.empty()) throw ConfigError("KS distance needs a nonempty sample");
    std::vector<double> sorted(samples);
    for (double x : sorted)
        if (!std::isfinite(x)) throw ConfigError("KS distance needs finite samples");
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = gumbel_cdf(law, sorted[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max({d, std::fabs(hi), std::fabs(lo)});
    }
    return d;
}

PpTailResult pp_tail(const CovarianceModel& model, double x, double t, double user_pickands) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("exceedance level must be positive");
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("interval length must be positive");
    const double h = pickands_constant(model.alpha, user_pickands);
    const double xv = x / model.v;
    PpTailResult res;
    res.value = std::pow(model.Q, 1.0 / model.alpha) * h / std::sqrt(2.0 * kPi) * t *
                std::pow(xv, 2.0 / model.alpha - 1.0) * std::exp(-0.5 * xv * xv);
    res.value_ok = res.value < 0.5;
    res.regime_ok = t * std::pow(x, 2.0 / model.alpha) >= 50.0;
    return res;
}

}  // namespace lastexit

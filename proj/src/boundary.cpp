#include "lastexit/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lastexit/errors.hpp"

namespace lastexit {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw ConfigError(msg);
}

}  // namespace

double Boundary::f(double x) const {
    switch (kind) {
        case BoundaryKind::Polynomial: return std::pow(x, d);
        case BoundaryKind::StretchedExponential: return std::exp(std::pow(x, q));
        case BoundaryKind::UserDefined: return f_fn(x);
    }
    return 0.0;
}

double Boundary::df(double x) const {
    switch (kind) {
        case BoundaryKind::Polynomial: return d * std::pow(x, d - 1.0);
        case BoundaryKind::StretchedExponential:
            return q * std::pow(x, q - 1.0) * std::exp(std::pow(x, q));
        case BoundaryKind::UserDefined: return df_fn(x);
    }
    return 0.0;
}

double Boundary::d2f(double x) const {
    switch (kind) {
        case BoundaryKind::Polynomial: return d * (d - 1.0) * std::pow(x, d - 2.0);
        case BoundaryKind::StretchedExponential: {
            const double xq = std::pow(x, q);
            return (q * (q - 1.0) * std::pow(x, q - 2.0) +
                    q * q * std::pow(x, 2.0 * q - 2.0)) *
                   std::exp(xq);
        }
        case BoundaryKind::UserDefined: return d2f_fn(x);
    }
    return 0.0;
}

double Boundary::finv(double y) const {
    switch (kind) {
        case BoundaryKind::Polynomial: return std::pow(y, 1.0 / d);
        case BoundaryKind::StretchedExponential: return std::pow(std::log(y), 1.0 / q);
        case BoundaryKind::UserDefined: return finv_fn(y);
    }
    return 0.0;
}

double Boundary::dfinv(double y) const {
    switch (kind) {
        case BoundaryKind::Polynomial: return (1.0 / d) * std::pow(y, 1.0 / d - 1.0);
        case BoundaryKind::StretchedExponential:
            return std::pow(std::log(y), 1.0 / q - 1.0) / (q * y);
        case BoundaryKind::UserDefined: return dfinv_fn(y);
    }
    return 0.0;
}

Boundary builtin_polynomial(double d) {
    require(std::isfinite(d) && d > 0.0, "polynomial boundary requires exponent d > 0");
    if (d == 1.0)
        throw UnsupportedError(
            "linear boundary f(x) = x has vanishing second derivative; the moving-boundary "
            "normalization is undefined for it");
    Boundary b;
    b.kind = BoundaryKind::Polynomial;
    b.d = d;
    b.lambda = 1.0;
    b.nu = d - 1.0;
    b.beta = 1.0 / d - 1.0;
    b.beta_tilde = b.beta;
    return b;
}

Boundary builtin_stretched_exponential(double q) {
    require(std::isfinite(q) && q > 0.0 && q < 1.0,
            "stretched-exponential boundary requires q in (0, 1)");
    Boundary b;
    b.kind = BoundaryKind::StretchedExponential;
    b.q = q;
    b.lambda = 1.0 - q;
    b.nu = q;
    b.beta = -1.0;
    b.beta_tilde = 0.0;
    return b;
}

Boundary user_defined(std::function<double(double)> f, std::function<double(double)> df,
                      std::function<double(double)> d2f, std::function<double(double)> finv,
                      std::function<double(double)> dfinv, double lambda, double beta,
                      double beta_tilde, double x_min, double reg_radius, double nu) {
    require(f && df && d2f && finv && dfinv, "user boundary requires all five callables");
    require(std::isfinite(lambda) && lambda > 0.0, "user boundary requires lambda > 0");
    require(std::isfinite(beta) && std::isfinite(beta_tilde), "user boundary exponents must be finite");
    require(std::isfinite(x_min) && x_min > 0.0, "user boundary requires x_min > 0");
    require(reg_radius > 0.0 && reg_radius < 1.0, "reg_radius must lie in (0, 1)");
    Boundary b;
    b.kind = BoundaryKind::UserDefined;
    b.f_fn = std::move(f);
    b.df_fn = std::move(df);
    b.d2f_fn = std::move(d2f);
    b.finv_fn = std::move(finv);
    b.dfinv_fn = std::move(dfinv);
    b.lambda = lambda;
    b.beta = beta;
    b.beta_tilde = beta_tilde;
    b.x_min = x_min;
    b.reg_radius = reg_radius;
    b.nu = nu;
    return b;
}

LambdaEstimate estimate_lambda(const Boundary& b, const std::vector<double>& probe_grid) {
    require(probe_grid.size() >= 8, "lambda probe needs at least 8 grid points");
    for (std::size_t i = 0; i + 1 < probe_grid.size(); ++i)
        require(probe_grid[i] < probe_grid[i + 1], "lambda probe grid must be strictly increasing");
    require(probe_grid.front() >= b.x_min, "lambda probe grid must lie inside the validity ray");
    require(probe_grid.back() >= 1e3 * probe_grid.front(),
            "lambda probe grid must span at least three decades");

    const std::size_t n = probe_grid.size();
    std::vector<double> ratio(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = probe_grid[i];
        const double dfx = b.df(x);
        require(std::isfinite(dfx) && dfx > 0.0, "boundary must be strictly increasing on the probe grid");
        ratio[i] = b.d2f(x) / dfx;
        if (!std::isfinite(ratio[i]) || ratio[i] == 0.0)
            throw VerificationError("curvature ratio f''/f' vanishes on the probe grid");
    }
    const bool positive = ratio.front() > 0.0;
    for (double r : ratio)
        if ((r > 0.0) != positive)
            throw VerificationError("curvature ratio f''/f' changes sign on the probe grid");

    // OLS slope of ln|f''/f'| against ln x; the model slope is -lambda.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(probe_grid[i]);
        const double ly = std::log(std::fabs(ratio[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;

    LambdaEstimate est;
    est.lambda_hat = -slope;
    est.band_lo = std::numeric_limits<double>::infinity();
    est.band_hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double scaled = std::fabs(ratio[i]) * std::pow(probe_grid[i], b.lambda);
        est.band_lo = std::min(est.band_lo, scaled);
        est.band_hi = std::max(est.band_hi, scaled);
    }
    est.band_ok = est.band_hi < 10.0 * est.band_lo;
    return est;
}

RegularityReport probe_regularity(const Boundary& b, double eps, double gamma) {
    require(std::isfinite(eps) && eps > 0.0 && eps < 1.0, "regularity probe requires eps in (0, 1)");
    const double rho = b.reg_radius;
    require(std::isfinite(gamma) && gamma * (1.0 - rho) > 1.0,
            "regularity probe requires gamma > 1 / (1 - reg_radius)");

    const double base = b.dfinv(1.0 / eps);
    require(std::isfinite(base) && base > 0.0, "(f^-1)' must be finite and positive at 1/eps");

    auto scaled_dfinv = [&](double y) {
        const double z = y / eps;
        const double val = b.dfinv(z);
        if (!std::isfinite(z) || !std::isfinite(val)) {
            char msg[96];
            std::snprintf(msg, sizeof msg, "(f^-1)' overflows at level y = %.6g", y);
            throw ConfigError(msg);
        }
        return val;
    };

    RegularityReport rep;
    const int samples = 129;

    const double lo1 = (1.0 - rho) * gamma;
    const double hi1 = (1.0 + rho) * gamma;
    for (int i = 0; i < samples; ++i) {
        const double y = lo1 + (hi1 - lo1) * static_cast<double>(i) / (samples - 1);
        const double g = scaled_dfinv(y) / (std::pow(y, b.beta) * base);
        rep.reg1_max_dev = std::max(rep.reg1_max_dev, std::fabs(g - 1.0));
    }

    const double lo2 = hi1;
    const double hi2 = 10.0 * gamma;
    for (int i = 0; i < samples; ++i) {
        const double y = lo2 + (hi2 - lo2) * static_cast<double>(i) / (samples - 1);
        const double h = scaled_dfinv(y) / (std::pow(y, b.beta_tilde) * base);
        rep.reg2_max_ratio = std::max(rep.reg2_max_ratio, h);
    }
    return rep;
}

std::vector<double> default_lambda_grid(std::size_t points) {
    require(points >= 8, "lambda probe needs at least 8 grid points");
    std::vector<double> g(points);
    const double l0 = std::log(1e2), l1 = std::log(1e5);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(points - 1));
    g.front() = 1e2;  // exp/log round trip can land a hair outside the span
    g.back() = 1e5;
    return g;
}

}  // namespace lastexit

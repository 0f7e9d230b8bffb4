// Boundary functions f (increasing to infinity on a validity ray) with
// derivatives, inverse, and the certified exponents the limit theorem needs:
// lambda from f''/f' ~ x^{-lambda}, and the regularity exponents (beta,
// beta_tilde) describing (f^{-1})' near and above the critical level.
#pragma once

#include <functional>
#include <vector>

namespace lastexit {

enum class BoundaryKind { Polynomial, StretchedExponential, UserDefined };

struct Boundary {
    BoundaryKind kind = BoundaryKind::Polynomial;
    double lambda = 1.0;
    double beta = 0.0;
    double beta_tilde = 0.0;
    double reg_radius = 0.25;  // regularity window half-width
    double x_min = 1.0;        // validity ray [x_min, inf)

    double d = 0.0;  // Polynomial exponent
    double q = 0.0;  // StretchedExponential exponent

    // UserDefined callables; unset for the analytic built-ins.
    std::function<double(double)> f_fn, df_fn, d2f_fn, finv_fn, dfinv_fn;

    double f(double x) const;
    double df(double x) const;
    double d2f(double x) const;
    double finv(double y) const;
    double dfinv(double y) const;

    // Growth-rate prefactor nu in f''/f' ~ nu x^{-lambda}; needed by the
    // refined gamma asymptotic. Built-ins declare it; <= 0 means unknown.
    double nu = 0.0;
};

// f(x) = x^d on [1, inf); beta = beta_tilde = 1/d - 1. d = 1 is rejected: the
// linear boundary has f'' = 0, so lambda is undefined and the limit theorem's
// hypotheses exclude it (it belongs to the constant-boundary theory).
Boundary builtin_polynomial(double d);

// f(x) = exp(x^q), q in (0,1); lambda = 1 - q, beta = -1, beta_tilde = 0.
Boundary builtin_stretched_exponential(double q);

Boundary user_defined(std::function<double(double)> f, std::function<double(double)> df,
                      std::function<double(double)> d2f, std::function<double(double)> finv,
                      std::function<double(double)> dfinv, double lambda, double beta,
                      double beta_tilde, double x_min, double reg_radius = 0.25,
                      double nu = 0.0);

struct LambdaEstimate {
    double lambda_hat = 0.0;
    double band_lo = 0.0;   // min of (f''/f') x^lambda over the grid
    double band_hi = 0.0;   // max of the same
    bool band_ok = false;   // bounded-ratio condition: band_hi/band_lo < 10
};

// Log-log slope of f''/f' against x over the probe grid (>= 3 decades inside
// the validity ray). Throws VerificationError if f''/f' changes sign.
LambdaEstimate estimate_lambda(const Boundary& b, const std::vector<double>& probe_grid);

struct RegularityReport {
    // max |(f^{-1})'(y/eps) / (y^beta (f^{-1})'(1/eps)) - 1| over the window
    // y in [(1-reg_radius) gamma, (1+reg_radius) gamma]
    double reg1_max_dev = 0.0;
    // max (f^{-1})'(y/eps) / (y^beta_tilde (f^{-1})'(1/eps)) over
    // y in [(1+reg_radius) gamma, 10 gamma]
    double reg2_max_ratio = 0.0;
};

RegularityReport probe_regularity(const Boundary& b, double eps, double gamma);

// Default probe grid for estimate_lambda: log-spaced over [1e2, 1e5].
std::vector<double> default_lambda_grid(std::size_t points = 31);

}  // namespace lastexit

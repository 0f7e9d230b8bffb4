#include "lastexit/normalize.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "lastexit/errors.hpp"

namespace lastexit {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool cond, const char* msg) {
    if (!cond) throw ConfigError(msg);
}

}  // namespace

double pickands_constant(double alpha, double user_h) {
    if (user_h > 0.0) {
        require(std::isfinite(user_h), "supplied Pickands constant must be finite");
        return user_h;
    }
    if (alpha == 1.0) return 1.0;
    if (alpha == 2.0) return 1.0 / std::sqrt(kPi);
    throw UnsupportedError(
        "no built-in Pickands constant for alpha outside {1, 2}; supply H_alpha explicitly");
}

double solve_gamma(const Boundary& b, double eps) {
    require(std::isfinite(eps) && eps > 0.0, "drift eps must be positive");
    const double w = b.dfinv(1.0 / eps) / eps;
    if (!(w > 1.0))
        throw ConfigError("eps too large: (f^-1)'(1/eps)/eps <= 1, asymptotic regime not entered");
    return std::sqrt(2.0 * std::log(w));
}

GammaAsymptotic gamma_asymptotic(const Boundary& b, double eps, bool refined) {
    require(std::isfinite(eps) && eps > 0.0 && eps < 1.0, "drift eps must lie in (0, 1)");
    GammaAsymptotic out;
    if (b.lambda >= 1.0) {
        out.value = std::sqrt(-std::log(eps));
        out.order_only = true;
        return out;
    }
    const double lam = b.lambda;
    const double loglog = std::log(-std::log(eps));
    require(loglog > 0.0, "eps too large: ln(-ln eps) <= 0");
    double g2 = (2.0 * lam / (1.0 - lam)) * loglog;
    if (refined) {
        if (!(b.nu > 0.0))
            throw ConfigError(
                "refined gamma asymptotic needs the curvature prefactor nu; the boundary does not "
                "declare one");
        g2 += (2.0 * lam / (1.0 - lam)) * std::log(1.0 - lam) -
              (2.0 / (1.0 - lam)) * std::log(b.nu);
    }
    require(g2 > 0.0, "eps too large for the gamma asymptotic");
    out.value = std::sqrt(g2);
    return out;
}

NormalizingConstants constants(const CovarianceModel& model, const Boundary& b, double eps,
                               double user_pickands) {
    require(std::isfinite(eps) && eps > 0.0, "drift eps must be positive");
    NormalizingConstants nc;
    nc.eps = eps;
    nc.eps_v = eps / model.v;
    nc.pickands_constant = pickands_constant(model.alpha, user_pickands);

    const double w = b.dfinv(1.0 / nc.eps_v) / nc.eps_v;
    if (!(w > 0.0))
        throw ConfigError("(f^-1)'(1/eps_v) must be positive");
    const double g2 = 2.0 * std::log(w) + (2.0 / model.alpha) * std::log(model.Q);
    if (!(g2 > 0.0))
        throw ConfigError("eps too large: critical level gamma^2 <= 0, asymptotic regime not entered");
    nc.gamma = std::sqrt(g2);

    nc.tau0 = b.finv(nc.gamma / nc.eps_v);
    if (!(nc.tau0 >= b.x_min)) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "centering time %.6g lies below the boundary validity ray [%.6g, inf)",
                      nc.tau0, b.x_min);
        throw ConfigError(msg);
    }
    const double slope = b.df(nc.tau0);
    require(std::isfinite(slope) && slope > 0.0, "boundary slope at the centering time must be positive");
    nc.B = 1.0 / (slope * nc.eps_v * nc.gamma);
    const double kappa = 2.0 / model.alpha + b.beta - 2.0;
    nc.A = nc.tau0 + nc.B * kappa * std::log(nc.gamma);
    nc.c = std::pow(model.Q, 1.0 / model.alpha) * nc.pickands_constant / std::sqrt(2.0 * kPi);
    return nc;
}

ClosedFormConstants polynomial_constants_closed_form(double d, double alpha, double eps) {
    require(std::isfinite(d) && d > 0.0 && d != 1.0, "polynomial expansion requires d > 0, d != 1");
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
    require(std::isfinite(eps) && eps > 0.0 && eps < 1.0, "drift eps must lie in (0, 1)");
    const double L = -2.0 * std::log(eps);
    require(L > 1.0, "eps too large for the polynomial expansion");
    ClosedFormConstants cf;
    cf.B = std::pow(L, 1.0 / (2.0 * d) - 1.0) / (std::pow(d, 1.0 / (2.0 * d)) * std::pow(eps, 1.0 / d));
    cf.A = cf.B * (L + (1.0 / alpha + 1.0 / (2.0 * d) - 1.5) * std::log(L) -
                   (1.0 / alpha + 1.0 / (2.0 * d) - 0.5) * std::log(d));
    return cf;
}

ClosedFormConstants stretched_exp_constants_closed_form(double q, double alpha, double eps) {
    require(std::isfinite(q) && q > 0.0 && q < 1.0, "stretched-exp expansion requires q in (0, 1)");
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
    require(std::isfinite(eps) && eps > 0.0 && eps < 1.0, "drift eps must lie in (0, 1)");
    const double l = -std::log(eps);
    const double ll = std::log(l);
    require(ll > 1.0, "eps too large for the stretched-exp expansion");
    const double pre = std::pow(l, 1.0 / q - 1.0);
    const double two_q = 2.0 / q - 2.0;
    ClosedFormConstants cf;
    cf.B = pre / ((2.0 - 2.0 * q) * ll);
    cf.A = (pre / q) * (q * l + 0.5 * std::log(ll) + 0.5 * std::log(two_q) +
                        (1.0 / alpha - 1.5) * std::log(ll) / (two_q * ll) +
                        ((1.0 / alpha - 1.5) * std::log(two_q) - std::log(q)) / (two_q * ll));
    return cf;
}

std::vector<LemmaRPoint> check_lemma_R(const Boundary& b, double alpha,
                                       const std::vector<double>& eps_ladder,
                                       const std::vector<double>& r_values) {
    require(!eps_ladder.empty() && !r_values.empty(), "shift-expansion check needs a ladder and offsets");
    for (std::size_t i = 0; i + 1 < eps_ladder.size(); ++i)
        require(eps_ladder[i] > eps_ladder[i + 1], "eps ladder must be strictly decreasing");
    const double kappa = 2.0 / alpha + b.beta - 2.0;

    std::vector<LemmaRPoint> curve;
    curve.reserve(eps_ladder.size() * r_values.size());
    for (double eps : eps_ladder) {
        const double g = solve_gamma(b, eps);
        const double tau0 = b.finv(g / eps);
        const double B = 1.0 / (b.df(tau0) * eps * g);
        const double A = tau0 + B * kappa * std::log(g);
        for (double r : r_values) {
            const double t = A + B * r;
            if (!(t >= b.x_min)) {
                char msg[128];
                std::snprintf(msg, sizeof msg,
                              "A + B R = %.6g falls below the boundary validity ray at eps = %.3g",
                              t, eps);
                throw ConfigError(msg);
            }
            LemmaRPoint pt;
            pt.eps = eps;
            pt.r = r;
            pt.residual = std::fabs(g * (b.f(t) * eps - g - kappa * std::log(g) / g - r / g));
            pt.regime_ok = std::fabs(r) <= 0.5 * std::log(g);
            curve.push_back(pt);
        }
    }
    return curve;
}

LemmaPropResult verify_lemma_prop(const Boundary& b, double alpha, double eps, double a,
                                  double b_off, double c_off, double theta) {
    require(std::isfinite(eps) && eps > 0.0, "drift eps must be positive");
    require(std::isfinite(a) && a > 0.0, "grid spacing a must be positive");
    require(std::isfinite(theta) && theta >= b.x_min, "theta must lie on the boundary validity ray");

    LemmaPropResult res;
    res.gamma = solve_gamma(b, eps);
    res.theta = theta;
    res.a = a;

    const double ftheta = b.f(theta);
    const double slope = b.df(theta);
    res.fprime_ratio_lo = b.df(theta - a) / slope;
    res.fprime_ratio_hi = b.df(theta + a) / slope;
    res.level_dev = std::fabs(ftheta * eps / res.gamma - 1.0);
    res.a_over_theta = a / theta;
    res.c_product = std::fabs(ftheta * c_off * eps * eps);
    res.a_product = ftheta * slope * a * eps * eps;

    std::string failed;
    auto flag = [&](bool ok, const char* name) {
        if (!ok) {
            if (!failed.empty()) failed += ", ";
            failed += name;
        }
    };
    flag(res.fprime_ratio_lo >= 0.9 && res.fprime_ratio_lo <= 1.1 &&
             res.fprime_ratio_hi >= 0.9 && res.fprime_ratio_hi <= 1.1,
         "f'(theta +- a)/f'(theta) outside [0.9, 1.1]");
    flag(res.level_dev <= 0.1, "f(theta) eps not within 10% of gamma");
    flag(res.a_over_theta < 0.1, "a/theta >= 0.1");
    flag(res.c_product < 0.1, "f(theta) c_off eps^2 >= 0.1");
    flag(res.a_product < 0.1, "f(theta) f'(theta) a eps^2 >= 0.1");
    if (!failed.empty())
        throw VerificationError("discrete-sum law hypotheses violated: " + failed);

    // Sum over grid points a i + b_off >= theta until terms are negligible.
    const double p = 2.0 / alpha - 1.0;
    long long i = static_cast<long long>(std::ceil((theta - b_off) / a));
    constexpr int kBlock = 8192;
    constexpr long long kMaxTerms = 200'000'000;
    double total = 0.0;
    long long count = 0;
    for (;;) {
        double last = 0.0;
        for (int k = 0; k < kBlock; ++k, ++i) {
            const double t = a * static_cast<double>(i) + b_off;
            const double z = b.f(t) * eps + c_off * eps;
            last = std::pow(z, p) * std::exp(-0.5 * z * z);
            total += last;
        }
        count += kBlock;
        if (!(std::isfinite(last)) || last < 1e-30 * total) break;
        if (count > kMaxTerms)
            throw ResourceError("discrete-sum evaluation did not converge within the term budget");
    }

    const double X = ftheta * eps;
    res.brute_sum = total;
    res.closed_form = std::exp(0.5 * res.gamma * res.gamma) / a *
                      std::pow(X, 2.0 / alpha + b.beta - 2.0) * std::exp(-0.5 * X * X);
    res.ratio = res.brute_sum / res.closed_form;
    return res;
}

double lemma_prop_default_spacing(const Boundary& b, double eps, double theta, double target) {
    require(std::isfinite(target) && target > 0.0, "spacing target must be positive");
    const double denom = b.f(theta) * b.df(theta) * eps * eps;
    require(std::isfinite(denom) && denom > 0.0, "boundary must be increasing at theta");
    return target / denom;
}

}  // namespace lastexit

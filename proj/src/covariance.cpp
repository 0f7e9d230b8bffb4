#include "lastexit/covariance.hpp"

#include "lastexit/errors.hpp"
#include "lastexit/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lastexit {

CovarianceModel CovarianceModel::power_exponential(double alpha, double kappa, double v) {
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw ConfigError("power_exponential: alpha must be in (0, 2], got " + fmt_double(alpha));
    if (!(kappa > 0.0))
        throw ConfigError("power_exponential: kappa must be positive, got " + fmt_double(kappa));
    if (!(v > 0.0))
        throw ConfigError("power_exponential: v must be positive, got " + fmt_double(v));
    CovarianceModel m;
    m.kind = CovKind::PowerExponential;
    m.alpha = alpha;
    m.kappa = kappa;
    m.Q = kappa;  // first-order Taylor of exp(-kappa t^alpha)
    m.v = v;
    return m;
}

CovarianceModel CovarianceModel::ornstein_uhlenbeck(double v) {
    CovarianceModel m = power_exponential(1.0, 1.0, v);
    m.kind = CovKind::OrnsteinUhlenbeck;
    return m;
}

CovarianceModel CovarianceModel::gaussian_kernel(double kappa, double v) {
    CovarianceModel m = power_exponential(2.0, kappa, v);
    m.kind = CovKind::GaussianKernel;
    return m;
}

CovarianceModel CovarianceModel::tabulated(std::vector<double> t, std::vector<double> rho,
                                           double alpha, double Q) {
    if (t.size() != rho.size() || t.size() < 2)
        throw ConfigError("tabulated covariance: need >= 2 (t, rho) pairs of equal length");
    if (t.front() != 0.0)
        throw ConfigError("tabulated covariance: grid must start at t = 0");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw ConfigError("tabulated covariance: lags must be strictly increasing");
    if (!(rho.front() > 0.0))
        throw ConfigError("tabulated covariance: rho(0) must be positive");
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw ConfigError("tabulated covariance: alpha must be in (0, 2]");
    if (!(Q > 0.0)) throw ConfigError("tabulated covariance: Q must be positive");
    CovarianceModel m;
    m.kind = CovKind::UserTabulated;
    m.v = std::sqrt(rho.front());
    m.alpha = alpha;
    m.Q = Q;
    m.kappa = Q;
    m.grid_t = std::move(t);
    m.grid_rho = std::move(rho);
    const double v2 = m.v * m.v;
    for (double r : m.grid_rho)
        if (std::abs(r) > v2 * (1.0 + 1e-12))
            throw ConfigError("tabulated covariance: |rho(t)| exceeds rho(0)");
    return m;
}

double CovarianceModel::max_lag() const {
    if (analytic()) return std::numeric_limits<double>::infinity();
    return grid_t.back();
}

double evaluate(const CovarianceModel& model, double lag) {
    if (!(lag >= 0.0)) throw ConfigError("evaluate: lag must be >= 0");
    if (model.analytic()) {
        return model.v * model.v * std::exp(-model.kappa * std::pow(lag, model.alpha));
    }
    const auto& t = model.grid_t;
    if (lag > t.back() * (1.0 + 1e-12))
        throw ConfigError("evaluate: lag " + fmt_double(lag) + " beyond tabulated range [0, " +
                          fmt_double(t.back()) + "]");
    if (lag >= t.back()) return model.grid_rho.back();
    auto it = std::upper_bound(t.begin(), t.end(), lag);
    std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    double w = (lag - t[i]) / (t[i + 1] - t[i]);
    return model.grid_rho[i] * (1.0 - w) + model.grid_rho[i + 1] * w;
}

double one_minus_corr(const CovarianceModel& model, double lag) {
    if (model.analytic()) return -std::expm1(-model.kappa * std::pow(lag, model.alpha));
    double v2 = model.v * model.v;
    return (v2 - evaluate(model, lag)) / v2;
}

CovarianceModel standardized(const CovarianceModel& model) {
    CovarianceModel m = model;
    m.v = 1.0;
    m.Q = 1.0;
    double time_scale = std::pow(model.Q, 1.0 / model.alpha);  // s = Q^{1/alpha} t
    if (m.analytic()) {
        // exp(-kappa t^alpha) = exp(-(kappa/Q) s^alpha); kappa = Q for our kinds.
        m.kappa = model.kappa / model.Q;
    } else {
        double v2 = model.v * model.v;
        for (auto& tt : m.grid_t) tt *= time_scale;
        for (auto& rr : m.grid_rho) rr /= v2;
        m.kappa = 1.0;
    }
    return m;
}

std::vector<double> default_pickands_ladder(int k_min, int k_max) {
    std::vector<double> lad;
    for (int k = k_min; k <= k_max; ++k) lad.push_back(std::ldexp(1.0, -k));
    return lad;
}

std::vector<double> default_berman_ladder() {
    return {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0};
}

PickandsReport certify_pickands(const CovarianceModel& model,
                                const std::vector<double>& lag_ladder, double tolerance) {
    if (lag_ladder.size() < 8)
        throw ConfigError("certify_pickands: need >= 8 ladder points");
    for (std::size_t i = 1; i < lag_ladder.size(); ++i)
        if (!(lag_ladder[i] < lag_ladder[i - 1]) || !(lag_ladder[i] > 0.0))
            throw ConfigError("certify_pickands: ladder must decrease strictly toward 0");
    if (tolerance <= 0.0) tolerance = model.analytic() ? 1e-3 : 1e-2;

    PickandsReport rep;
    rep.tolerance = tolerance;
    rep.v_hat = std::sqrt(evaluate(model, 0.0));

    const std::size_t n = lag_ladder.size();
    for (double t : lag_ladder) {
        double res = one_minus_corr(model, t) / (model.Q * std::pow(t, model.alpha)) - 1.0;
        rep.residual_curve.emplace_back(t, res);
    }

    // Fit on the smallest lags only: the fitted slope picks up curvature bias
    // from the o(t^alpha) term if large lags enter.
    std::size_t fit_n = std::max<std::size_t>(4, (n + 2) / 3);
    if (fit_n > n) fit_n = n;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = n - fit_n; i < n; ++i) {
        double t = lag_ladder[i];
        double y = one_minus_corr(model, t);
        if (!(y > 0.0))
            throw VerificationError("certify_pickands: v^2 - rho(t) not positive at lag " +
                                    fmt_double(t));
        double lx = std::log(t), ly = std::log(y);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    double m_ = static_cast<double>(fit_n);
    double denom = m_ * sxx - sx * sx;
    if (denom == 0.0) throw VerificationError("certify_pickands: degenerate fit grid");
    rep.alpha_hat = (m_ * sxy - sx * sy) / denom;
    rep.Q_hat = std::exp((sy - rep.alpha_hat * sx) / m_);

    double dev = std::max({std::abs(rep.alpha_hat - model.alpha) / model.alpha,
                           std::abs(rep.Q_hat - model.Q) / model.Q,
                           std::abs(rep.v_hat - model.v) / model.v});
    rep.max_rel_dev = dev;
    rep.passed = dev < tolerance;

    auto fail = [&](const std::string& why) {
        std::ostringstream os;
        os << "certify_pickands failed: " << why << "; residual curve:";
        for (auto& [t, r] : rep.residual_curve) os << " (" << t << ", " << r << ")";
        throw VerificationError(os.str());
    };

    // Residual magnitudes must shrink toward 0 with the lag (10% slack, noise
    // floor at tolerance/10 to ignore interpolation wiggle in tabulated data).
    double floor_ = tolerance / 10.0;
    for (std::size_t i = 1; i < n; ++i) {
        double prev = std::abs(rep.residual_curve[i - 1].second);
        double cur = std::abs(rep.residual_curve[i].second);
        if (cur > floor_ && cur > prev * 1.10)
            fail("residual magnitude not decreasing toward lag 0");
    }
    if (!rep.passed) {
        std::ostringstream os;
        os << "fitted parameters deviate " << rep.max_rel_dev << " > tolerance " << tolerance
           << " (alpha_hat=" << rep.alpha_hat << ", Q_hat=" << rep.Q_hat
           << ", v_hat=" << rep.v_hat << ")";
        fail(os.str());
    }
    return rep;
}

BermanReport certify_berman(const CovarianceModel& model,
                            const std::vector<double>& horizon_ladder) {
    if (horizon_ladder.empty() || horizon_ladder.back() < 1e3)
        throw ConfigError("certify_berman: ladder must be increasing with final point >= 1000");
    for (std::size_t i = 1; i < horizon_ladder.size(); ++i)
        if (!(horizon_ladder[i] > horizon_ladder[i - 1]))
            throw ConfigError("certify_berman: ladder must be increasing");

    const double burn_in = 10.0;
    BermanReport rep;
    double v2 = model.v * model.v;
    double first_after_burnin = -1.0, last = 0.0;
    bool monotone = true, all_tiny = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double t : horizon_ladder) {
        double w = std::abs(evaluate(model, t)) * std::log(t);
        rep.witness.emplace_back(t, w);
        if (t < burn_in) continue;
        rep.sup_tail_corr = std::max(rep.sup_tail_corr, std::abs(evaluate(model, t)) / v2);
        if (first_after_burnin < 0.0) first_after_burnin = w;
        if (w > prev * (1.0 + 1e-12) + 1e-300) monotone = false;
        if (w >= 1e-12) all_tiny = false;
        prev = w;
        last = w;
    }
    if (first_after_burnin < 0.0)
        throw ConfigError("certify_berman: ladder has no points beyond burn-in t >= 10");
    rep.passed = all_tiny || (monotone && last <= 0.5 * first_after_burnin);
    return rep;
}

}  // namespace lastexit

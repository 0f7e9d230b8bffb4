// Stationary covariance models rho(t) with certified local behavior
// rho(t) = v^2 (1 - Q t^alpha + o(t^alpha)) near 0 and o(1/ln t) decay at
// infinity. Analytic kinds are v^2 exp(-kappa |t|^alpha); tabulated models
// interpolate a user grid.
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace lastexit {

enum class CovKind { PowerExponential, OrnsteinUhlenbeck, GaussianKernel, UserTabulated };

struct CovarianceModel {
    CovKind kind = CovKind::OrnsteinUhlenbeck;
    double v = 1.0;      // process standard deviation, rho(0) = v^2
    double Q = 1.0;      // local roughness coefficient (units time^-alpha)
    double alpha = 1.0;  // local exponent in (0, 2]
    double kappa = 1.0;  // decay rate of the analytic kinds; Q = kappa for them

    // UserTabulated: strictly increasing lags starting at 0 and rho values.
    std::vector<double> grid_t;
    std::vector<double> grid_rho;

    static CovarianceModel power_exponential(double alpha, double kappa, double v = 1.0);
    static CovarianceModel ornstein_uhlenbeck(double v = 1.0);
    static CovarianceModel gaussian_kernel(double kappa = 1.0, double v = 1.0);
    // v is taken from sqrt(rho(0)); alpha and Q must be declared by the user.
    static CovarianceModel tabulated(std::vector<double> t, std::vector<double> rho,
                                     double alpha, double Q);

    bool analytic() const { return kind != CovKind::UserTabulated; }
    double max_lag() const;  // +inf for analytic kinds
};

// rho(lag), lag >= 0. Exact formula for analytic kinds, linear interpolation
// for tabulated ones; lag beyond the table throws (no silent extrapolation).
double evaluate(const CovarianceModel& model, double lag);

// (v^2 - rho(lag)) / v^2 without cancellation for analytic kinds (-expm1).
double one_minus_corr(const CovarianceModel& model, double lag);

// Standardized copy: values scaled by 1/v, time by Q^{1/alpha}, so v = Q = 1.
CovarianceModel standardized(const CovarianceModel& model);

struct PickandsReport {
    double v_hat = 0.0;
    double Q_hat = 0.0;
    double alpha_hat = 0.0;
    double max_rel_dev = 0.0;  // max over the three parameters
    double tolerance = 0.0;
    bool passed = false;
    // (lag, (1-rho/v^2)/(Q lag^alpha) - 1) over the full ladder.
    std::vector<std::pair<double, double>> residual_curve;
};

// Fits (alpha, Q) by log-log regression of v^2 - rho(t) on the smallest
// max(4, ceil(n/3)) ladder lags (the local regime dominates there); the full
// ladder is reported as a residual curve. Throws VerificationError if the fit
// deviates beyond tolerance or the residual magnitudes fail to shrink as
// t -> 0. Default tolerance: 1e-3 analytic, 1e-2 tabulated.
PickandsReport certify_pickands(const CovarianceModel& model,
                                const std::vector<double>& lag_ladder,
                                double tolerance = 0.0);

struct BermanReport {
    bool passed = false;
    double sup_tail_corr = 0.0;  // sup |rho(t)|/v^2 beyond burn-in
    // (t, |rho(t)| ln t) along the ladder.
    std::vector<std::pair<double, double>> witness;
};

// Checks |rho(t)| ln t -> 0: beyond the burn-in prefix (t >= 10) the witness
// must be non-increasing and end at most half its burn-in value (or be
// uniformly below 1e-12). Pure check, never throws on failure.
BermanReport certify_berman(const CovarianceModel& model,
                            const std::vector<double>& horizon_ladder);

// Shared ladder defaults.
std::vector<double> default_pickands_ladder(int k_min = 4, int k_max = 16);
std::vector<double> default_berman_ladder();

}  // namespace lastexit

#include "lastexit/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lastexit/errors.hpp"
#include "lastexit/io.hpp"
#include "lastexit/stats.hpp"
#include "lastexit/version.hpp"

namespace lastexit {

namespace {

constexpr double kCensorMultiple = 10.0;   // censor beyond A + 10 B
constexpr double kHorizonMultiple = 12.0;  // simulate to A + 12 B

}  // namespace

StudyGrid resolve_grid(const CovarianceModel& model, const NormalizingConstants& nc,
                       const GridPolicy& policy) {
    StudyGrid grid;

    if (policy.step < 0.0 || policy.horizon < 0.0 || !std::isfinite(policy.step) ||
        !std::isfinite(policy.horizon)) {
        throw ConfigError("grid step and horizon must be finite and nonnegative");
    }

    if (policy.step > 0.0) {
        grid.step = policy.step;
    } else {
        // Three scales matter: the normalization width B (fluctuations of the
        // normalized exit time), the covariance mixing time, and the local
        // excursion scale at level gamma. Resolve all of them.
        double inv_alpha = 1.0 / model.alpha;
        double mixing_scale = std::pow(model.kappa, -inv_alpha);
        double level = std::max(nc.gamma, 1.0);
        double local_scale = std::pow(model.kappa * level * level, -inv_alpha);
        grid.step = std::min({0.1 * nc.B, 0.1 * mixing_scale, local_scale / 64.0});
    }

    grid.censor_time = nc.A + kCensorMultiple * nc.B;
    grid.horizon = (policy.horizon > 0.0) ? policy.horizon : nc.A + kHorizonMultiple * nc.B;
    if (grid.horizon <= 0.0) throw ConfigError("study horizon must be positive");

    double n_real = std::ceil(grid.horizon / grid.step) + 1.0;
    if (n_real > static_cast<double>(std::size_t{1} << 22)) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "study grid needs %.3g nodes (step %.3g, horizon %.3g); exceeds the 2^22 "
                      "sampler limit",
                      n_real, grid.step, grid.horizon);
        throw ResourceError(msg);
    }
    grid.n = static_cast<std::size_t>(n_real);
    if (grid.n < 2) throw ConfigError("study grid must have at least 2 nodes");
    return grid;
}

ExitTimeStudy run_study(const CovarianceModel& model, const Boundary& b, double eps,
                        std::size_t n_replicates, const GridPolicy& policy, std::uint64_t seed,
                        Exec exec) {
    if (n_replicates == 0) throw ConfigError("study needs at least one replicate");

    ExitTimeStudy study;
    study.eps = eps;
    study.seed = seed;
    study.n_replicates = n_replicates;
    study.constants = constants(model, b, eps);
    study.grid = resolve_grid(model, study.constants, policy);

    PathSampler sampler(model, study.grid.n, study.grid.step);
    std::vector<double> bound =
        scaled_boundary_values(b, eps, 0.0, study.grid.step, study.grid.n);

    study.per_replicate.assign(n_replicates, ExitResult{});
    batch_last_exit(sampler, bound, seed, n_replicates, study.per_replicate.data(), exec);

    const double A = study.constants.A;
    const double B = study.constants.B;
    study.raw_exit_times.reserve(n_replicates);
    study.normalized.reserve(n_replicates);
    for (const ExitResult& r : study.per_replicate) {
        switch (r.kind) {
            case ExitKind::NoExit:
                ++study.no_exit_count;
                break;
            case ExitKind::Censored:
                ++study.censored_count;
                break;
            case ExitKind::Exit:
                if (r.time > study.grid.censor_time) {
                    // Landed inside the guard band past A + 10 B: the tail
                    // beyond the censor time is not trusted, count it as
                    // censored rather than as an observed exit.
                    ++study.censored_count;
                } else {
                    study.raw_exit_times.push_back(r.time);
                    study.normalized.push_back((r.time - A) / B);
                }
                break;
        }
    }

    double censored_fraction =
        static_cast<double>(study.censored_count) / static_cast<double>(n_replicates);
    study.valid = censored_fraction <= study.censoring_budget;
    return study;
}

std::string study_csv(const ExitTimeStudy& study, const nlohmann::json& config) {
    // The config comment carries the resolved constants and grid so a later
    // pass over the file can rebuild the limit law without recomputing.
    nlohmann::json cfg = config;
    cfg["seed"] = study.seed;
    cfg["constants"] = {{"gamma", study.constants.gamma}, {"tau0", study.constants.tau0},
                        {"A", study.constants.A},         {"B", study.constants.B},
                        {"c", study.constants.c},         {"eps", study.eps}};
    cfg["grid"] = {{"step", study.grid.step},
                   {"horizon", study.grid.horizon},
                   {"censor_time", study.grid.censor_time},
                   {"n", study.grid.n}};

    std::string out;
    out += "# version: ";
    out += kVersion;
    out += "\n# config: ";
    out += cfg.dump();
    out += "\n";
    out += "replicate,raw_T,normalized_T,censored(0/1)\n";

    const double A = study.constants.A;
    const double B = study.constants.B;
    char line[160];
    for (std::size_t i = 0; i < study.per_replicate.size(); ++i) {
        const ExitResult& r = study.per_replicate[i];
        bool censored = r.kind == ExitKind::Censored ||
                        (r.kind == ExitKind::Exit && r.time > study.grid.censor_time);
        if (r.kind == ExitKind::NoExit) {
            std::snprintf(line, sizeof line, "%zu,-inf,-inf,0\n", i);
        } else {
            std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%d\n", i, r.time,
                          (r.time - A) / B, censored ? 1 : 0);
        }
        out += line;
    }
    return out;
}

double empirical_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ConfigError("quantile of an empty sample");
    if (p < 0.0 || p > 1.0) throw ConfigError("quantile level must lie in [0, 1]");
    if (sorted.size() == 1) return sorted[0];
    double h = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo >= sorted.size() - 1) return sorted.back();
    double w = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - w) + sorted[lo + 1] * w;
}

nlohmann::json study_summary(const ExitTimeStudy& study) {
    nlohmann::json out;
    out["eps"] = study.eps;
    out["n_replicates"] = study.n_replicates;
    out["n_exits"] = study.normalized.size();
    out["censored_count"] = study.censored_count;
    out["no_exit_count"] = study.no_exit_count;
    out["censored_fraction"] =
        static_cast<double>(study.censored_count) / static_cast<double>(study.n_replicates);
    out["valid"] = study.valid;
    out["grid"] = {{"step", study.grid.step},
                   {"horizon", study.grid.horizon},
                   {"censor_time", study.grid.censor_time},
                   {"n", study.grid.n}};
    out["constants"] = {{"gamma", study.constants.gamma}, {"tau0", study.constants.tau0},
                        {"A", study.constants.A},         {"B", study.constants.B},
                        {"c", study.constants.c},         {"eps", study.constants.eps}};

    GumbelLaw law{study.constants.c};
    if (!study.normalized.empty()) {
        std::vector<double> sorted = study.normalized;
        std::sort(sorted.begin(), sorted.end());
        out["ks_distance"] = ks_distance(study.normalized, law);
        nlohmann::json table = nlohmann::json::array();
        for (int k = 1; k <= 9; ++k) {
            double p = 0.1 * k;
            table.push_back({{"level", p},
                             {"empirical", empirical_quantile(sorted, p)},
                             {"theoretical", gumbel_quantile(law, p)}});
        }
        out["quantile_table"] = table;
    } else {
        out["ks_distance"] = nullptr;
        out["quantile_table"] = nlohmann::json::array();
    }
    return out;
}

}  // namespace lastexit

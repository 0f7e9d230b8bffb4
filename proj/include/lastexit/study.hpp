// End-to-end last-exit experiment: resolve a simulation grid from the
// normalizing constants, sample replicate paths, extract and normalize exit
// times, and summarize the fit against the limit law.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lastexit/boundary.hpp"
#include "lastexit/covariance.hpp"
#include "lastexit/exit_scan.hpp"
#include "lastexit/kernels.hpp"
#include "lastexit/normalize.hpp"

namespace lastexit {

struct GridPolicy {
    double step = 0.0;     // 0 = auto: min(B/10, mixing_scale/10, local_scale/64)
    double horizon = 0.0;  // 0 = auto: A + 12 B
};

struct StudyGrid {
    double step = 0.0;
    double horizon = 0.0;       // simulated end time (last node >= horizon)
    double censor_time = 0.0;   // A + 10 B; exceedances beyond it are censored
    std::size_t n = 0;          // node count, grid t_i = i * step
};

struct ExitTimeStudy {
    double eps = 0.0;
    NormalizingConstants constants;
    StudyGrid grid;
    std::uint64_t seed = 0;
    std::size_t n_replicates = 0;

    std::vector<ExitResult> per_replicate;  // full record, replicate order
    std::vector<double> raw_exit_times;     // uncensored exits only
    std::vector<double> normalized;         // (T - A)/B, same order/length
    std::size_t censored_count = 0;
    std::size_t no_exit_count = 0;          // never above the boundary

    double censoring_budget = 1e-3;
    bool valid = false;  // censored fraction within budget
};

// Expands the policy against the constants: auto step resolves the scale B,
// the covariance mixing time, and the local fluctuation scale at level
// gamma; auto horizon is A + 12 B with censoring past A + 10 B.
StudyGrid resolve_grid(const CovarianceModel& model, const NormalizingConstants& nc,
                       const GridPolicy& policy);

ExitTimeStudy run_study(const CovarianceModel& model, const Boundary& b, double eps,
                        std::size_t n_replicates, const GridPolicy& policy, std::uint64_t seed,
                        Exec exec = Exec::OpenMP);

// CSV with one row per replicate: replicate,raw_T,normalized_T,censored(0/1).
// No-exit replicates carry -inf in the time columns.
std::string study_csv(const ExitTimeStudy& study, const nlohmann::json& config);

// {eps, D, n, censored_fraction, no_exit_fraction, valid, constants,
//  quantile_table (deciles: level, empirical, theoretical)}
nlohmann::json study_summary(const ExitTimeStudy& study);

// Type-7 (linear interpolation) empirical quantile of a sorted sample.
double empirical_quantile(const std::vector<double>& sorted, double p);

}  // namespace lastexit

// Batch Monte Carlo kernels over replicate ranges: covariance accumulation,
// level-exceedance counting, and last-exit extraction. Each has an OpenMP
// execution mode and a serial reference twin computing the bit-identical
// result; floating-point sums are blocked so thread count never changes a
// value. bench_kernels compares the two modes.
#pragma once

#include <cstdint>
#include <vector>

#include "lastexit/exit_scan.hpp"
#include "lastexit/sampler.hpp"

namespace lastexit {

enum class Exec { Serial, OpenMP };

struct CovMoments {
    std::size_t n_replicates = 0;
    std::size_t n = 0;
    // row-major n x n: (1/R) sum over replicates of Y_i Y_j
    std::vector<double> second_moment;
    // row-major n x n: (1/R) sum of (Y_i Y_j)^2, for per-entry standard errors
    std::vector<double> product_square_moment;

    // standard error of second_moment[i*n+j] (sample std of the products / sqrt R)
    double standard_error(std::size_t i, std::size_t j) const;
};

CovMoments batch_covariance(const PathSampler& sampler, std::uint64_t seed,
                            std::size_t n_replicates, Exec exec);
CovMoments batch_covariance_ref(const PathSampler& sampler, std::uint64_t seed,
                                std::size_t n_replicates);

// Number of replicates whose path maximum reaches `level`.
std::uint64_t batch_exceedance(const PathSampler& sampler, std::uint64_t seed,
                               std::size_t n_replicates, double level, Exec exec);
std::uint64_t batch_exceedance_ref(const PathSampler& sampler, std::uint64_t seed,
                                   std::size_t n_replicates, double level);

// out[r] receives the last-exit result of replicate r against the
// precomputed scaled boundary (one value per grid node).
void batch_last_exit(const PathSampler& sampler, const std::vector<double>& scaled_boundary,
                     std::uint64_t seed, std::size_t n_replicates, ExitResult* out, Exec exec);
void batch_last_exit_ref(const PathSampler& sampler, const std::vector<double>& scaled_boundary,
                         std::uint64_t seed, std::size_t n_replicates, ExitResult* out);

// Worker cap from GUMBEL_EXIT_THREADS; 0 means "let the runtime decide".
int configured_thread_count();

// Applies configured_thread_count() to the OpenMP runtime (no-op when 0).
void apply_thread_config();

}  // namespace lastexit

#include "lastexit/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "kernels_core.hpp"
#include "lastexit/errors.hpp"

namespace lastexit {

using detail::block_count;
using detail::kBlockReplicates;
using detail::PairBuffers;

CovMoments batch_covariance(const PathSampler& sampler, std::uint64_t seed,
                            std::size_t n_replicates, Exec exec) {
    if (exec == Exec::Serial) return batch_covariance_ref(sampler, seed, n_replicates);
    if (n_replicates == 0) throw ConfigError("batch kernels need n_replicates >= 1");

    const std::size_t n = sampler.n();
    const std::size_t blocks = block_count(n_replicates);
    std::vector<std::vector<double>> partials(blocks), partials_sq(blocks);

#pragma omp parallel
    {
        PairBuffers buf(n);
#pragma omp for schedule(dynamic)
        for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
            auto& partial = partials[static_cast<std::size_t>(b)];
            auto& partial_sq = partials_sq[static_cast<std::size_t>(b)];
            partial.assign(n * n, 0.0);
            partial_sq.assign(n * n, 0.0);
            detail::cov_block(sampler, seed, static_cast<std::size_t>(b), n_replicates, buf,
                              partial.data(), partial_sq.data());
        }
    }

    CovMoments out;
    out.n_replicates = n_replicates;
    out.n = n;
    out.second_moment.assign(n * n, 0.0);
    out.product_square_moment.assign(n * n, 0.0);
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t ij = 0; ij < n * n; ++ij) {
            out.second_moment[ij] += partials[b][ij];
            out.product_square_moment[ij] += partials_sq[b][ij];
        }
    const double inv = 1.0 / static_cast<double>(n_replicates);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double m = out.second_moment[i * n + j] * inv;
            const double m2 = out.product_square_moment[i * n + j] * inv;
            out.second_moment[i * n + j] = m;
            out.second_moment[j * n + i] = m;
            out.product_square_moment[i * n + j] = m2;
            out.product_square_moment[j * n + i] = m2;
        }
    return out;
}

double CovMoments::standard_error(std::size_t i, std::size_t j) const {
    const double m = second_moment[i * n + j];
    const double m2 = product_square_moment[i * n + j];
    const double r = static_cast<double>(n_replicates);
    const double var = std::max(m2 - m * m, 0.0) * r / (r - 1.0);
    return std::sqrt(var / r);
}

std::uint64_t batch_exceedance(const PathSampler& sampler, std::uint64_t seed,
                               std::size_t n_replicates, double level, Exec exec) {
    if (exec == Exec::Serial) return batch_exceedance_ref(sampler, seed, n_replicates, level);
    if (n_replicates == 0) throw ConfigError("batch kernels need n_replicates >= 1");

    const std::size_t blocks = block_count(n_replicates);
    std::uint64_t count = 0;

#pragma omp parallel
    {
        PairBuffers buf(sampler.n());
#pragma omp for schedule(dynamic) reduction(+ : count)
        for (long long b = 0; b < static_cast<long long>(blocks); ++b)
            count += detail::exceedance_block(sampler, seed, static_cast<std::size_t>(b),
                                              n_replicates, level, buf);
    }
    return count;
}

void batch_last_exit(const PathSampler& sampler, const std::vector<double>& scaled_boundary,
                     std::uint64_t seed, std::size_t n_replicates, ExitResult* out, Exec exec) {
    if (exec == Exec::Serial) {
        batch_last_exit_ref(sampler, scaled_boundary, seed, n_replicates, out);
        return;
    }
    if (n_replicates == 0) throw ConfigError("batch kernels need n_replicates >= 1");
    if (scaled_boundary.size() != sampler.n())
        throw ConfigError("scaled boundary length must match the sampler grid");

    const std::size_t blocks = block_count(n_replicates);

#pragma omp parallel
    {
        PairBuffers buf(sampler.n());
#pragma omp for schedule(dynamic)
        for (long long b = 0; b < static_cast<long long>(blocks); ++b)
            detail::last_exit_block(sampler, scaled_boundary.data(), seed,
                                    static_cast<std::size_t>(b), n_replicates, buf, out);
    }
}

int configured_thread_count() {
    const char* env = std::getenv("GUMBEL_EXIT_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 0)
        throw ConfigError("GUMBEL_EXIT_THREADS must be a nonnegative integer");
    return static_cast<int>(value);
}

void apply_thread_config() {
    const int t = configured_thread_count();
    if (t > 0) omp_set_num_threads(t);
}

}  // namespace lastexit

// Serial reference twins of the OpenMP batch kernels. Same per-block cores,
// same block order, no threading: outputs are bit-identical to the OpenMP
// mode at any thread count, which the tests assert.
#include "kernels_core.hpp"
#include "lastexit/errors.hpp"
#include "lastexit/kernels.hpp"

namespace lastexit {

using detail::block_count;
using detail::PairBuffers;

CovMoments batch_covariance_ref(const PathSampler& sampler, std::uint64_t seed,
                                std::size_t n_replicates) {
    if (n_replicates == 0) throw ConfigError("batch kernels need n_replicates >= 1");
    const std::size_t n = sampler.n();
    const std::size_t blocks = block_count(n_replicates);

    CovMoments out;
    out.n_replicates = n_replicates;
    out.n = n;
    out.second_moment.assign(n * n, 0.0);
    out.product_square_moment.assign(n * n, 0.0);

    PairBuffers buf(n);
    std::vector<double> partial(n * n), partial_sq(n * n);
    for (std::size_t b = 0; b < blocks; ++b) {
        partial.assign(n * n, 0.0);
        partial_sq.assign(n * n, 0.0);
        detail::cov_block(sampler, seed, b, n_replicates, buf, partial.data(), partial_sq.data());
        for (std::size_t ij = 0; ij < n * n; ++ij) {
            out.second_moment[ij] += partial[ij];
            out.product_square_moment[ij] += partial_sq[ij];
        }
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

std::uint64_t batch_exceedance_ref(const PathSampler& sampler, std::uint64_t seed,
                                   std::size_t n_replicates, double level) {
    if (n_replicates == 0) throw ConfigError("batch kernels need n_replicates >= 1");
    const std::size_t blocks = block_count(n_replicates);
    PairBuffers buf(sampler.n());
    std::uint64_t count = 0;
    for (std::size_t b = 0; b < blocks; ++b)
        count += detail::exceedance_block(sampler, seed, b, n_replicates, level, buf);
    return count;
}

void batch_last_exit_ref(const PathSampler& sampler, const std::vector<double>& scaled_boundary,
                         std::uint64_t seed, std::size_t n_replicates, ExitResult* out) {
    if (n_replicates == 0) throw ConfigError("batch kernels need n_replicates >= 1");
    if (scaled_boundary.size() != sampler.n())
        throw ConfigError("scaled boundary length must match the sampler grid");
    const std::size_t blocks = block_count(n_replicates);
    PairBuffers buf(sampler.n());
    for (std::size_t b = 0; b < blocks; ++b)
        detail::last_exit_block(sampler, scaled_boundary.data(), seed, b, n_replicates, buf, out);
}

}  // namespace lastexit

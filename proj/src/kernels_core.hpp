// Per-block batch cores shared by the OpenMP kernels and their serial
// reference twins. All floating-point accumulation happens inside fixed
// replicate blocks in index order, so a result is a pure function of
// (sampler, seed, n_replicates) no matter how blocks are scheduled.
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "lastexit/exit_scan.hpp"
#include "lastexit/sampler.hpp"

namespace lastexit::detail {

// Even, so replicate pairs never straddle a block boundary.
constexpr std::size_t kBlockReplicates = 1024;

inline std::size_t block_count(std::size_t n_replicates) {
    return (n_replicates + kBlockReplicates - 1) / kBlockReplicates;
}

struct PairBuffers {
    std::vector<double> re, im;
    FftWorkspace ws;

    explicit PairBuffers(std::size_t n) : re(n), im(n) {}
};

// Runs fn(replicate_index, path_values) for every replicate in the block,
// in ascending index order.
template <typename Fn>
inline void for_block_replicates(const PathSampler& sampler, std::uint64_t seed,
                                 std::size_t block, std::size_t n_replicates, PairBuffers& buf,
                                 Fn&& fn) {
    const std::size_t r_begin = block * kBlockReplicates;
    const std::size_t r_end = std::min(r_begin + kBlockReplicates, n_replicates);
    for (std::size_t r = r_begin; r < r_end; r += 2) {
        sampler.sample_pair(seed, r >> 1, buf.re.data(), buf.im.data(), nullptr, buf.ws);
        fn(r, buf.re.data());
        if (r + 1 < r_end) fn(r + 1, buf.im.data());
    }
}

inline void cov_block(const PathSampler& sampler, std::uint64_t seed, std::size_t block,
                      std::size_t n_replicates, PairBuffers& buf, double* partial,
                      double* partial_sq) {
    const std::size_t n = sampler.n();
    for_block_replicates(sampler, seed, block, n_replicates, buf,
                         [n, partial, partial_sq](std::size_t, const double* y) {
                             for (std::size_t i = 0; i < n; ++i) {
                                 const double yi = y[i];
                                 double* row = partial + i * n;
                                 double* row_sq = partial_sq + i * n;
                                 for (std::size_t j = 0; j <= i; ++j) {
                                     const double p = yi * y[j];
                                     row[j] += p;
                                     row_sq[j] += p * p;
                                 }
                             }
                         });
}

inline std::uint64_t exceedance_block(const PathSampler& sampler, std::uint64_t seed,
                                      std::size_t block, std::size_t n_replicates,
                                      double level, PairBuffers& buf) {
    const std::size_t n = sampler.n();
    std::uint64_t count = 0;
    for_block_replicates(sampler, seed, block, n_replicates, buf,
                         [n, level, &count](std::size_t, const double* y) {
                             for (std::size_t i = 0; i < n; ++i)
                                 if (y[i] >= level) {
                                     ++count;
                                     break;
                                 }
                         });
    return count;
}

inline void last_exit_block(const PathSampler& sampler, const double* scaled_boundary,
                            std::uint64_t seed, std::size_t block, std::size_t n_replicates,
                            PairBuffers& buf, ExitResult* out) {
    const std::size_t n = sampler.n();
    const double step = sampler.step();
    for_block_replicates(sampler, seed, block, n_replicates, buf,
                         [&](std::size_t r, const double* y) {
                             out[r] = last_exit_scan(y, scaled_boundary, n, 0.0, step);
                         });
}

}  // namespace lastexit::detail

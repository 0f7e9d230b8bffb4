#include "lastexit/slepian.hpp"

#include <cmath>
#include <cstdio>

#include "kernels_core.hpp"
#include "lastexit/errors.hpp"
#include "lastexit/rng.hpp"
#include "lastexit/sampler.hpp"

namespace lastexit {

namespace {

// Surrogate draws hash a shifted seed so they are independent of the
// original-path draws under the same user seed.
constexpr std::uint64_t kSurrogateSeedOffset = std::uint64_t{1} << 62;

struct IntervalNodes {
    std::size_t i0 = 0;
    std::size_t i1 = 0;  // inclusive
    std::size_t count() const { return i1 - i0 + 1; }
};

IntervalNodes align(const SlepianInterval& iv, double step) {
    if (!(iv.t1 > iv.t0) || iv.t0 < 0.0) {
        throw ConfigError("ordering-check intervals need 0 <= t0 < t1");
    }
    IntervalNodes nodes;
    nodes.i0 = static_cast<std::size_t>(std::ceil(iv.t0 / step - 1e-9));
    nodes.i1 = static_cast<std::size_t>(std::floor(iv.t1 / step + 1e-9));
    if (nodes.i1 <= nodes.i0) {
        throw ConfigError("ordering-check interval holds fewer than two grid nodes");
    }
    return nodes;
}

bool any_at_or_above(const double* y, std::size_t i0, std::size_t i1, double level) {
    for (std::size_t i = i0; i <= i1; ++i)
        if (y[i] >= level) return true;
    return false;
}

double proportion_se(double p, std::size_t n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

SlepianReport slepian_check(const CovarianceModel& model, const SlepianInterval& first,
                            const SlepianInterval& second, double level, double delta2,
                            double step, std::size_t n_replicates, std::uint64_t seed,
                            Exec exec, bool share_block) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("grid step must be positive");
    if (!std::isfinite(level)) throw ConfigError("exceedance level must be finite");
    if (!(delta2 >= 0.0 && delta2 < 1.0)) throw ConfigError("delta^2 must lie in [0, 1)");
    if (n_replicates < 2) throw ConfigError("ordering check needs at least 2 replicates");

    IntervalNodes a = align(first, step);
    IntervalNodes b = align(second, step);
    if (b.i0 <= a.i1) throw ConfigError("ordering-check intervals must be disjoint and ordered");
    if (share_block && a.count() != b.count()) {
        throw ConfigError("share_block requires equal-length intervals");
    }

    SlepianReport report;
    report.delta2 = delta2;
    report.level = level;
    report.n_replicates = n_replicates;

    // Largest cross-interval correlation of the true process; the surrogate
    // construction only dominates when delta^2 reaches it.
    const double var = model.v * model.v;
    for (std::size_t i = a.i0; i <= a.i1; ++i) {
        for (std::size_t j = b.i0; j <= b.i1; ++j) {
            double lag = static_cast<double>(j - i) * step;
            double corr = std::fabs(evaluate(model, lag)) / var;
            if (corr > report.max_cross_corr) report.max_cross_corr = corr;
        }
    }
    report.hypothesis_ok = delta2 >= report.max_cross_corr;

    // True process on the full grid covering both intervals.
    const std::size_t n_full = b.i1 + 1;
    PathSampler full(model, n_full, step);

    const std::size_t n_blocks = detail::block_count(n_replicates);
    std::uint64_t hits_original = 0;

    auto original_block = [&](std::size_t block, detail::PairBuffers& buf) {
        std::uint64_t hits = 0;
        detail::for_block_replicates(
            full, seed, block, n_replicates, buf, [&](std::size_t, const double* y) {
                if (any_at_or_above(y, a.i0, a.i1, level) ||
                    any_at_or_above(y, b.i0, b.i1, level))
                    ++hits;
            });
        return hits;
    };

    if (exec == Exec::OpenMP) {
#pragma omp parallel
        {
            detail::PairBuffers buf(n_full);
            std::uint64_t local = 0;
#pragma omp for schedule(dynamic) nowait
            for (long long blk = 0; blk < static_cast<long long>(n_blocks); ++blk)
                local += original_block(static_cast<std::size_t>(blk), buf);
#pragma omp atomic
            hits_original += local;
        }
    } else {
        detail::PairBuffers buf(n_full);
        for (std::size_t blk = 0; blk < n_blocks; ++blk) hits_original += original_block(blk, buf);
    }

    // Surrogate: one sampler on the longer interval's local grid; the two
    // independent halves of a replicate pair serve as the per-interval blocks
    // and the trailing draw is the shared shift.
    const std::size_t n_local = std::max(a.count(), b.count());
    PathSampler local_sampler(model, n_local, step);
    const double carry = std::sqrt(1.0 - delta2);
    const double shift = std::sqrt(delta2);

    std::uint64_t hits_inflated = 0;
    auto surrogate_block = [&](std::size_t block, detail::PairBuffers& buf) {
        std::uint64_t hits = 0;
        const std::size_t r_begin = block * detail::kBlockReplicates;
        const std::size_t r_end =
            std::min(r_begin + detail::kBlockReplicates, n_replicates);
        for (std::size_t r = r_begin; r < r_end; ++r) {
            double xi = 0.0;
            local_sampler.sample_pair(seed + kSurrogateSeedOffset, r, buf.re.data(),
                                      buf.im.data(), &xi, buf.ws);
            const double* block_a = buf.re.data();
            const double* block_b = share_block ? buf.re.data() : buf.im.data();
            const double bump = shift * xi * model.v;
            bool hit = false;
            for (std::size_t i = 0; i < a.count() && !hit; ++i)
                hit = carry * block_a[i] + bump >= level;
            for (std::size_t i = 0; i < b.count() && !hit; ++i)
                hit = carry * block_b[i] + bump >= level;
            if (hit) ++hits;
        }
        return hits;
    };

    if (exec == Exec::OpenMP) {
#pragma omp parallel
        {
            detail::PairBuffers buf(n_local);
            std::uint64_t local = 0;
#pragma omp for schedule(dynamic) nowait
            for (long long blk = 0; blk < static_cast<long long>(n_blocks); ++blk)
                local += surrogate_block(static_cast<std::size_t>(blk), buf);
#pragma omp atomic
            hits_inflated += local;
        }
    } else {
        detail::PairBuffers buf(n_local);
        for (std::size_t blk = 0; blk < n_blocks; ++blk)
            hits_inflated += surrogate_block(blk, buf);
    }

    const double nr = static_cast<double>(n_replicates);
    report.p_original = static_cast<double>(hits_original) / nr;
    report.p_inflated = static_cast<double>(hits_inflated) / nr;
    report.se_original = proportion_se(report.p_original, n_replicates);
    report.se_inflated = proportion_se(report.p_inflated, n_replicates);
    report.se_combined = std::sqrt(report.se_original * report.se_original +
                                   report.se_inflated * report.se_inflated);
    report.passed = report.p_original >= report.p_inflated - 2.0 * report.se_combined;
    return report;
}

}  // namespace lastexit

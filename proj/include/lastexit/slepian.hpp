// Monte Carlo check of the Gaussian comparison step used to decouple distant
// time intervals: the exceedance probability of the true process over a union
// of two separated intervals must dominate that of a surrogate with the
// cross-interval correlation inflated to a constant delta^2. The surrogate is
// U_j(t) = sqrt(1 - delta^2) W_j(t) + delta xi with independent blocks W_j and
// one shared standard normal xi, valid whenever delta^2 bounds every
// cross-interval correlation of the original.
#pragma once

#include <cstdint>
#include <vector>

#include "lastexit/covariance.hpp"
#include "lastexit/kernels.hpp"

namespace lastexit {

struct SlepianInterval {
    double t0 = 0.0;
    double t1 = 0.0;
};

struct SlepianReport {
    double delta2 = 0.0;
    double level = 0.0;
    std::size_t n_replicates = 0;

    double p_original = 0.0;  // P(sup over both intervals >= level), true process
    double p_inflated = 0.0;  // same event for the surrogate
    double se_original = 0.0;
    double se_inflated = 0.0;
    double se_combined = 0.0;

    // largest |rho(s - t)| / v^2 over cross-interval node pairs
    double max_cross_corr = 0.0;
    bool hypothesis_ok = false;  // delta2 >= max_cross_corr
    bool passed = false;         // p_original >= p_inflated - 2 se_combined
};

// Exactly two disjoint intervals, grid-aligned to `step`. share_block forces
// both intervals to reuse one block draw (the fully coupled degenerate case,
// only meaningful for equal-length intervals in unit tests).
SlepianReport slepian_check(const CovarianceModel& model, const SlepianInterval& first,
                            const SlepianInterval& second, double level, double delta2,
                            double step, std::size_t n_replicates, std::uint64_t seed,
                            Exec exec = Exec::OpenMP, bool share_block = false);

}  // namespace lastexit

// Last-exit-time extraction: scan a sampled path against the scaled boundary
// eps * f(t) from the right and return the linearly interpolated root of the
// final down-crossing. A path still at or above the boundary at the last node
// is censored (the true exit may lie beyond the horizon), never guessed.
#pragma once

#include <cstddef>
#include <vector>

#include "lastexit/boundary.hpp"
#include "lastexit/sampler.hpp"

namespace lastexit {

enum class ExitKind { Exit, NoExit, Censored };

struct ExitResult {
    ExitKind kind = ExitKind::NoExit;
    double time = 0.0;  // crossing time for Exit, final-node time for Censored
};

// eps * f(t_i) on the uniform grid start + i*step, i = 0..n-1.
std::vector<double> scaled_boundary_values(const Boundary& b, double eps, double start,
                                           double step, std::size_t n);

// Core scan over precomputed boundary values.
ExitResult last_exit_scan(const double* values, const double* scaled_boundary, std::size_t n,
                          double start, double step);

ExitResult last_exit_time(const PathSample& path, const Boundary& b, double eps);

}  // namespace lastexit

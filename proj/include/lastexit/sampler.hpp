// Exact sampling of stationary Gaussian paths on uniform grids via circulant
// embedding: the covariance sequence is extended to a nonnegative-definite
// circulant whose FFT gives independent spectral amplitudes, so one complex
// transform yields two independent exact draws (real and imaginary parts).
// Tabulated models whose extension is never nonnegative fall back to a dense
// eigenfactorization for n <= 2^13.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lastexit/covariance.hpp"

namespace lastexit {

struct PathSample {
    double grid_start = 0.0;
    double grid_step = 0.0;
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::uint64_t replicate_index = 0;
};

namespace detail {
struct FftPlan;
}

// Per-thread scratch buffers for the FFT; reusable across draws from the
// same sampler. Not thread-safe; give each thread its own.
class FftWorkspace {
public:
    FftWorkspace() = default;
    explicit FftWorkspace(std::size_t m);
    ~FftWorkspace();
    FftWorkspace(FftWorkspace&& other) noexcept;
    FftWorkspace& operator=(FftWorkspace&& other) noexcept;
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    std::size_t size() const { return m_; }
    void resize(std::size_t m);
    double* data() { return buf_; }  // interleaved re/im, 2m doubles

private:
    std::size_t m_ = 0;
    double* buf_ = nullptr;
};

// Immutable sampling plan for one (model, n, step); draws are pure functions
// of (seed, replicate). Replicates are paired: pair p = replicate >> 1 owns
// one RNG stream, and the two independent paths of one transform serve
// replicates 2p (real part) and 2p+1 (imaginary part).
class PathSampler {
public:
    PathSampler(const CovarianceModel& model, std::size_t n, double step);

    std::size_t n() const { return n_; }
    double step() const { return step_; }
    bool dense() const { return dense_; }
    // circulant length m (0 when dense); eigenvalue floor before clipping
    std::size_t embedding_length() const { return m_; }
    double min_eigenvalue() const { return min_eig_; }

    // Draws both paths of a replicate pair; re/im each receive n values.
    // xi, when non-null, receives one extra standard normal drawn after the
    // path variates (the common shift used by the ordering test).
    void sample_pair(std::uint64_t seed, std::uint64_t pair, double* re, double* im,
                     double* xi, FftWorkspace& ws) const;

    PathSample sample(std::uint64_t seed, std::uint64_t replicate, FftWorkspace& ws) const;

private:
    std::size_t n_ = 0;
    double step_ = 0.0;
    bool dense_ = false;
    std::size_t m_ = 0;
    double min_eig_ = 0.0;
    std::vector<double> amplitude_;       // sqrt(lambda_k / m), circulant path
    std::shared_ptr<detail::FftPlan> plan_;
    std::vector<double> dense_factor_;    // row-major n x n, dense path
};

// One-shot convenience wrapper over PathSampler.
PathSample sample_path(const CovarianceModel& model, std::size_t n, double step,
                       std::uint64_t seed, std::uint64_t replicate);

}  // namespace lastexit

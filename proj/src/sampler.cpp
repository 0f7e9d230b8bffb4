#include "lastexit/sampler.hpp"

#include <fftw3.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>

#include "lastexit/errors.hpp"
#include "lastexit/rng.hpp"

namespace lastexit {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

constexpr double kEigFloor = -1e-10;
constexpr std::size_t kDenseMaxN = std::size_t{1} << 13;

std::size_t next_pow2(std::size_t x) {
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

}  // namespace

namespace detail {

struct FftPlan {
    fftw_plan plan = nullptr;
    std::size_t m = 0;

    explicit FftPlan(std::size_t m_in) : m(m_in) {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_complex* tmp = fftw_alloc_complex(m);
        if (!tmp) throw ResourceError("FFT buffer allocation failed");
        plan = fftw_plan_dft_1d(static_cast<int>(m), tmp, tmp, FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_free(tmp);
        if (!plan) throw ResourceError("FFT plan creation failed");
    }
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        if (plan) fftw_destroy_plan(plan);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    void execute(double* buf) const {
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf),
                         reinterpret_cast<fftw_complex*>(buf));
    }
};

}  // namespace detail

FftWorkspace::FftWorkspace(std::size_t m) { resize(m); }

FftWorkspace::~FftWorkspace() {
    if (buf_) fftw_free(buf_);
}

FftWorkspace::FftWorkspace(FftWorkspace&& other) noexcept : m_(other.m_), buf_(other.buf_) {
    other.m_ = 0;
    other.buf_ = nullptr;
}

FftWorkspace& FftWorkspace::operator=(FftWorkspace&& other) noexcept {
    if (this != &other) {
        if (buf_) fftw_free(buf_);
        m_ = other.m_;
        buf_ = other.buf_;
        other.m_ = 0;
        other.buf_ = nullptr;
    }
    return *this;
}

void FftWorkspace::resize(std::size_t m) {
    if (m == m_) return;
    if (buf_) fftw_free(buf_);
    buf_ = nullptr;
    m_ = 0;
    if (m == 0) return;
    buf_ = static_cast<double*>(fftw_malloc(sizeof(double) * 2 * m));
    if (!buf_) throw ResourceError("FFT buffer allocation failed");
    m_ = m;
}

PathSampler::PathSampler(const CovarianceModel& model, std::size_t n, double step)
    : n_(n), step_(step) {
    if (n < 2) throw ConfigError("path sampling needs a grid of length >= 2");
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("grid step must be positive");
    if (n > (std::size_t{1} << 22))
        throw ResourceError("grid length " + std::to_string(n) + " exceeds the 2^22 budget");

    const double max_lag = model.max_lag();
    const std::size_t base_m = next_pow2(2 * n - 2);

    // Try circulant extensions of doubling length until the spectrum is
    // nonnegative (up to the -1e-10 floor) or the padding cap is reached.
    for (std::size_t m = base_m; m <= 16 * base_m; m <<= 1) {
        if (static_cast<double>(m / 2) * step > max_lag) break;  // table too short
        std::vector<double> lam(m);
        {
            detail::FftPlan probe(m);
            FftWorkspace ws(m);
            double* buf = ws.data();
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t fold = std::min(j, m - j);
                buf[2 * j] = evaluate(model, static_cast<double>(fold) * step);
                buf[2 * j + 1] = 0.0;
            }
            probe.execute(buf);
            for (std::size_t k = 0; k < m; ++k) lam[k] = buf[2 * k];
        }
        const double lo = *std::min_element(lam.begin(), lam.end());
        if (lo < kEigFloor) continue;
        min_eig_ = lo;
        m_ = m;
        amplitude_.resize(m);
        for (std::size_t k = 0; k < m; ++k)
            amplitude_[k] = std::sqrt(std::max(lam[k], 0.0) / static_cast<double>(m));
        plan_ = std::make_shared<detail::FftPlan>(m);
        return;
    }

    if (model.analytic())
        throw UnsupportedError(
            "no nonnegative circulant embedding within the 16x padding cap; use a finer grid or a "
            "different covariance model");
    if (n > kDenseMaxN)
        throw UnsupportedError(
            "covariance table has no nonnegative circulant embedding and the grid exceeds the "
            "dense-sampling cap n <= 8192");

    std::fprintf(stderr,
                 "warning: covariance table is not circulant-embeddable at this grid; falling back "
                 "to dense eigenfactorization (O(n^3) setup, O(n^2) per path, n = %zu)\n",
                 n);

    Eigen::MatrixXd gram(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double val = evaluate(model, static_cast<double>(i - j) * step);
            gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = val;
            gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = val;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success)
        throw ResourceError("dense eigenfactorization of the covariance failed");
    const double top = eig.eigenvalues().maxCoeff();
    // roundoff in an n x n solve scales with the spectral radius
    const double floor = kEigFloor * std::max(1.0, top);
    min_eig_ = eig.eigenvalues().minCoeff();
    if (min_eig_ < floor)
        throw UnsupportedError(
            "covariance table is not positive semidefinite on this grid (eigenvalue " +
            std::to_string(min_eig_) + "); it is not a valid stationary covariance");
    Eigen::MatrixXd factor =
        eig.eigenvectors() *
        eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    dense_ = true;
    dense_factor_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            dense_factor_[i * n + j] =
                factor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

void PathSampler::sample_pair(std::uint64_t seed, std::uint64_t pair, double* re, double* im,
                              double* xi, FftWorkspace& ws) const {
    auto eng = stream_engine(seed, pair);
    std::normal_distribution<double> gauss(0.0, 1.0);

    if (!dense_) {
        ws.resize(m_);
        double* buf = ws.data();
        for (std::size_t k = 0; k < m_; ++k) {
            const double a = gauss(eng);
            const double b = gauss(eng);
            buf[2 * k] = amplitude_[k] * a;
            buf[2 * k + 1] = amplitude_[k] * b;
        }
        plan_->execute(buf);
        for (std::size_t i = 0; i < n_; ++i) {
            re[i] = buf[2 * i];
            im[i] = buf[2 * i + 1];
        }
    } else {
        std::vector<double> z(n_);
        for (double* out : {re, im}) {
            for (std::size_t i = 0; i < n_; ++i) z[i] = gauss(eng);
            for (std::size_t i = 0; i < n_; ++i) {
                double acc = 0.0;
                const double* row = &dense_factor_[i * n_];
                for (std::size_t j = 0; j < n_; ++j) acc += row[j] * z[j];
                out[i] = acc;
            }
        }
    }
    if (xi) *xi = gauss(eng);
}

PathSample PathSampler::sample(std::uint64_t seed, std::uint64_t replicate,
                               FftWorkspace& ws) const {
    std::vector<double> re(n_), im(n_);
    sample_pair(seed, replicate >> 1, re.data(), im.data(), nullptr, ws);
    PathSample out;
    out.grid_start = 0.0;
    out.grid_step = step_;
    out.seed = seed;
    out.replicate_index = replicate;
    out.values = (replicate & 1) ? std::move(im) : std::move(re);
    return out;
}

PathSample sample_path(const CovarianceModel& model, std::size_t n, double step,
                       std::uint64_t seed, std::uint64_t replicate) {
    PathSampler sampler(model, n, step);
    FftWorkspace ws;
    return sampler.sample(seed, replicate, ws);
}

}  // namespace lastexit

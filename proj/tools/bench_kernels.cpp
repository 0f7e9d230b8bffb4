// Timing harness comparing the OpenMP kernels against their serial reference
// twins, asserting the results agree bit for bit. --smoke shrinks the sizes
// so the comparison runs in CI time.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "lastexit/boundary.hpp"
#include "lastexit/covariance.hpp"
#include "lastexit/errors.hpp"
#include "lastexit/exit_scan.hpp"
#include "lastexit/kernels.hpp"
#include "lastexit/sampler.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int run(bool smoke) {
    using namespace lastexit;
    apply_thread_config();

    const std::size_t n = smoke ? 256 : 2048;
    const double step = 0.01;
    const std::size_t reps_exceed = smoke ? 4096 : 65536;
    const std::size_t reps_exit = smoke ? 4096 : 32768;
    const std::uint64_t seed = 20240917;

    CovarianceModel model = CovarianceModel::ornstein_uhlenbeck();
    PathSampler sampler(model, n, step);
    std::printf("grid n=%zu step=%g embedding m=%zu (threads: %d)\n", n, step,
                sampler.embedding_length(), configured_thread_count());

    int failures = 0;

    {
        auto t0 = Clock::now();
        std::uint64_t count_omp = batch_exceedance(sampler, seed, reps_exceed, 2.5, Exec::OpenMP);
        double t_omp = seconds_since(t0);
        t0 = Clock::now();
        std::uint64_t count_ref = batch_exceedance_ref(sampler, seed, reps_exceed, 2.5);
        double t_ref = seconds_since(t0);
        bool same = count_omp == count_ref;
        if (!same) ++failures;
        std::printf("exceedance  R=%zu  openmp %.3fs  serial %.3fs  speedup %.2fx  %s\n",
                    reps_exceed, t_omp, t_ref, t_ref / t_omp, same ? "match" : "MISMATCH");
    }

    {
        Boundary b = builtin_polynomial(2);
        const double eps = 0.05;
        std::vector<double> bound = scaled_boundary_values(b, eps, 0.0, step, n);
        std::vector<ExitResult> out_omp(reps_exit), out_ref(reps_exit);

        auto t0 = Clock::now();
        batch_last_exit(sampler, bound, seed, reps_exit, out_omp.data(), Exec::OpenMP);
        double t_omp = seconds_since(t0);
        t0 = Clock::now();
        batch_last_exit_ref(sampler, bound, seed, reps_exit, out_ref.data());
        double t_ref = seconds_since(t0);

        bool same = true;
        for (std::size_t i = 0; i < reps_exit && same; ++i) {
            same = out_omp[i].kind == out_ref[i].kind &&
                   std::memcmp(&out_omp[i].time, &out_ref[i].time, sizeof(double)) == 0;
        }
        if (!same) ++failures;
        std::printf("last-exit   R=%zu  openmp %.3fs  serial %.3fs  speedup %.2fx  %s\n",
                    reps_exit, t_omp, t_ref, t_ref / t_omp, same ? "match" : "MISMATCH");
    }

    {
        const std::size_t n_cov = smoke ? 96 : 256;
        const std::size_t reps_cov = smoke ? 2048 : 16384;
        PathSampler small(model, n_cov, step);
        auto t0 = Clock::now();
        CovMoments m_omp = batch_covariance(small, seed, reps_cov, Exec::OpenMP);
        double t_omp = seconds_since(t0);
        t0 = Clock::now();
        CovMoments m_ref = batch_covariance_ref(small, seed, reps_cov);
        double t_ref = seconds_since(t0);
        bool same =
            std::memcmp(m_omp.second_moment.data(), m_ref.second_moment.data(),
                        m_omp.second_moment.size() * sizeof(double)) == 0 &&
            std::memcmp(m_omp.product_square_moment.data(), m_ref.product_square_moment.data(),
                        m_omp.product_square_moment.size() * sizeof(double)) == 0;
        if (!same) ++failures;
        std::printf("covariance  R=%zu n=%zu  openmp %.3fs  serial %.3fs  speedup %.2fx  %s\n",
                    reps_cov, n_cov, t_omp, t_ref, t_ref / t_omp, same ? "match" : "MISMATCH");
    }

    if (failures) {
        std::printf("%d kernel(s) diverged from the serial reference\n", failures);
        return 1;
    }
    std::printf("all kernels match the serial reference bit for bit\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    bool smoke = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--smoke") == 0) {
            smoke = true;
        } else {
            std::fprintf(stderr, "usage: bench_kernels [--smoke]\n");
            return 2;
        }
    }
    try {
        return run(smoke);
    } catch (const lastexit::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

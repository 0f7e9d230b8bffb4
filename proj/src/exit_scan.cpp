#include "lastexit/exit_scan.hpp"

#include <cmath>

#include "lastexit/errors.hpp"

namespace lastexit {

std::vector<double> scaled_boundary_values(const Boundary& b, double eps, double start,
                                           double step, std::size_t n) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("drift eps must be positive");
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("grid step must be positive");
    if (start < 0.0) throw ConfigError("grid start must be nonnegative");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = start + static_cast<double>(i) * step;
        out[i] = eps * b.f(t);
        if (!std::isfinite(out[i]))
            throw ConfigError("boundary value not finite at t = " + std::to_string(t));
    }
    return out;
}

ExitResult last_exit_scan(const double* values, const double* scaled_boundary, std::size_t n,
                          double start, double step) {
    if (n < 2) throw ConfigError("exit scan needs a grid of length >= 2");
    ExitResult res;
    const double d_last = values[n - 1] - scaled_boundary[n - 1];
    if (d_last >= 0.0) {
        res.kind = ExitKind::Censored;
        res.time = start + static_cast<double>(n - 1) * step;
        return res;
    }
    double d_right = d_last;
    for (std::size_t i = n - 1; i-- > 0;) {
        const double d = values[i] - scaled_boundary[i];
        if (d >= 0.0) {
            // last down-crossing: root of the secant through (t_i, d), (t_{i+1}, d_right)
            res.kind = ExitKind::Exit;
            res.time = start + static_cast<double>(i) * step + step * d / (d - d_right);
            return res;
        }
        d_right = d;
    }
    res.kind = ExitKind::NoExit;
    return res;
}

ExitResult last_exit_time(const PathSample& path, const Boundary& b, double eps) {
    const std::size_t n = path.values.size();
    const auto eb = scaled_boundary_values(b, eps, path.grid_start, path.grid_step, n);
    return last_exit_scan(path.values.data(), eb.data(), n, path.grid_start, path.grid_step);
}

}  // namespace lastexit

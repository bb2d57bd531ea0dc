#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "shadowing/errors.hpp"

namespace shadowing {

enum class Method {
    rk4_fixed,     // classical RK4 on a uniform grid, bit-reproducible
    rk45_adaptive, // Dormand-Prince 5(4) with error control
};

struct IntegrationConfig {
    Method method = Method::rk4_fixed;
    int steps_per_period = 4096; // uniform grid density (also the rk45 initial step hint)
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double max_step = 0.0; // 0 = no cap

    void validate() const {
        if (steps_per_period < 64)
            throw validation_error("steps_per_period must be at least 64");
        if (!(abs_tol > 0.0) || abs_tol > 1e-3)
            throw validation_error("abs_tol must lie in (0, 1e-3]");
        if (!(rel_tol > 0.0) || rel_tol > 1e-3)
            throw validation_error("rel_tol must lie in (0, 1e-3]");
        if (max_step < 0.0 || !std::isfinite(max_step))
            throw validation_error("max_step must be finite and non-negative");
    }
};

namespace detail {

template <std::size_t N>
bool all_finite(const std::array<double, N>& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

// Classical RK4 with a fixed step count. Node times are computed as affine
// combinations of the endpoints, not accumulated, so they stay exact.
// The observer sees every node, including t0, along with the derivative there.
template <std::size_t N, class RHS, class Obs>
void integrate_fixed_rk4(RHS&& rhs, std::array<double, N> y, double t0, double t1, long n_steps,
                         Obs&& obs) {
    if (n_steps < 1) throw validation_error("integration needs at least one step");
    using State = std::array<double, N>;
    const double h = (t1 - t0) / static_cast<double>(n_steps);
    State k1, k2, k3, k4, tmp;
    rhs(t0, y, k1);
    obs(t0, y, k1);
    for (long i = 0; i < n_steps; ++i) {
        const double t = t0 + (t1 - t0) * (static_cast<double>(i) / static_cast<double>(n_steps));
        const double t_next =
            i + 1 == n_steps ? t1
                             : t0 + (t1 - t0) * (static_cast<double>(i + 1) / static_cast<double>(n_steps));
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + h * k3[j];
        rhs(t + h, tmp, k4);
        for (std::size_t j = 0; j < N; ++j)
            y[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if (!all_finite(y))
            throw numerical_error("integration diverged near t=" + std::to_string(t_next));
        rhs(t_next, y, k1);
        obs(t_next, y, k1);
    }
}

// Dormand-Prince 5(4). Accepted nodes are reported to the observer (with the
// FSAL derivative); the solution advances with the 5th order weights.
template <std::size_t N, class RHS, class Obs>
void integrate_rk45(RHS&& rhs, std::array<double, N> y, double t0, double t1,
                    const IntegrationConfig& cfg, Obs&& obs) {
    using State = std::array<double, N>;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
    static constexpr double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
    static constexpr double e4 = 125.0 / 192.0 - 393.0 / 640.0;
    static constexpr double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
    static constexpr double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
    static constexpr double e7 = -1.0 / 40.0;
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    if (span == 0.0) {
        State f;
        rhs(t0, y, f);
        obs(t0, y, f);
        return;
    }
    double h_cap = cfg.max_step > 0.0 ? cfg.max_step : span;
    double h = std::min({2.0 * std::numbers::pi / cfg.steps_per_period, h_cap, span});

    State k1, k2, k3, k4, k5, k6, k7, tmp, y_new;
    double t = t0;
    rhs(t, y, k1);
    obs(t, y, k1);
    const double h_min = 1e-14 * std::max({std::abs(t0), std::abs(t1), 1.0});
    long guard = 0;
    while (dir * (t1 - t) > 0.0) {
        if (++guard > 50'000'000L) throw numerical_error("adaptive integrator exceeded its step budget");
        h = std::min(h, h_cap);
        if (dir * (t1 - t) < h) h = dir * (t1 - t);
        const double hs = dir * h;

        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + hs * a21 * k1[j];
        rhs(t + c2 * hs, tmp, k2);
        for (std::size_t j = 0; j < N; ++j) tmp[j] = y[j] + hs * (a31 * k1[j] + a32 * k2[j]);
        rhs(t + c3 * hs, tmp, k3);
        for (std::size_t j = 0; j < N; ++j)
            tmp[j] = y[j] + hs * (a41 * k1[j] + a42 * k2[j] + a43 * k3[j]);
        rhs(t + c4 * hs, tmp, k4);
        for (std::size_t j = 0; j < N; ++j)
            tmp[j] = y[j] + hs * (a51 * k1[j] + a52 * k2[j] + a53 * k3[j] + a54 * k4[j]);
        rhs(t + c5 * hs, tmp, k5);
        for (std::size_t j = 0; j < N; ++j)
            tmp[j] = y[j] + hs * (a61 * k1[j] + a62 * k2[j] + a63 * k3[j] + a64 * k4[j] + a65 * k5[j]);
        rhs(t + hs, tmp, k6);
        for (std::size_t j = 0; j < N; ++j)
            y_new[j] = y[j] + hs * (b1 * k1[j] + b3 * k3[j] + b4 * k4[j] + b5 * k5[j] + b6 * k6[j]);
        rhs(t + hs, y_new, k7);

        double err = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            double e = hs * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * k7[j]);
            double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[j]), std::abs(y_new[j]));
            err += (e / scale) * (e / scale);
        }
        err = std::sqrt(err / static_cast<double>(N));

        if (err <= 1.0 || h <= h_min) {
            t = t + hs;
            y = y_new;
            k1 = k7;
            if (!all_finite(y))
                throw numerical_error("integration diverged near t=" + std::to_string(t));
            obs(t, y, k1);
        }
        double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < h_min) {
            if (err > 1.0) throw numerical_error("adaptive step size underflow near t=" + std::to_string(t));
            h = h_min;
        }
    }
}

// Cubic Hermite interpolation between two nodes with known derivatives.
inline double hermite_value(double t0, double y0, double f0, double t1, double y1, double f1,
                            double t) {
    const double h = t1 - t0;
    if (h == 0.0) return y0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * f0 +
           (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * f1;
}

} // namespace detail

} // namespace shadowing

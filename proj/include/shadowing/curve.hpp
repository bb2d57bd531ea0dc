#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "shadowing/errors.hpp"
#include "shadowing/vec2.hpp"

namespace shadowing {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// One coordinate of a trigonometric polynomial:
//   f(t) = a0 + sum_k a[k-1] cos(k t) + b[k-1] sin(k t)
struct FourierCoeffs {
    double a0 = 0.0;
    std::vector<double> a;
    std::vector<double> b;

    std::size_t harmonics() const { return std::max(a.size(), b.size()); }
    double cos_coeff(std::size_t k) const { return k - 1 < a.size() ? a[k - 1] : 0.0; }
    double sin_coeff(std::size_t k) const { return k - 1 < b.size() ? b[k - 1] : 0.0; }
};

struct Jet2 {
    Vec2 position;
    Vec2 velocity;
    Vec2 acceleration;
};

// Closed plane curve with 2pi-periodic trigonometric coordinates. All
// evaluation reduces the argument first, so large times do not lose accuracy.
class ClosedCurve {
public:
    ClosedCurve() = default;
    ClosedCurve(FourierCoeffs x, FourierCoeffs y) : x_(std::move(x)), y_(std::move(y)) {
        for (double v : {x_.a0, y_.a0})
            if (!std::isfinite(v)) throw validation_error("curve coefficient is not finite");
        for (const auto* c : {&x_, &y_})
            for (const auto* vec : {&c->a, &c->b})
                for (double v : *vec)
                    if (!std::isfinite(v)) throw validation_error("curve coefficient is not finite");
        if (harmonics() == 0) throw validation_error("curve has no harmonics; it is a single point");
    }

    const FourierCoeffs& x() const { return x_; }
    const FourierCoeffs& y() const { return y_; }
    std::size_t harmonics() const { return std::max(x_.harmonics(), y_.harmonics()); }

    Vec2 evaluate(double t) const { return eval(t, 0); }
    Vec2 derivative(double t) const { return eval(t, 1); }
    Vec2 second_derivative(double t) const { return eval(t, 2); }

    Jet2 jet2(double t) const {
        Jet2 j;
        const double tr = std::remainder(t, two_pi);
        const double c1 = std::cos(tr), s1 = std::sin(tr);
        double ck = 1.0, sk = 0.0;
        j.position = {x_.a0, y_.a0};
        const std::size_t K = harmonics();
        for (std::size_t k = 1; k <= K; ++k) {
            const double cn = ck * c1 - sk * s1;
            const double sn = sk * c1 + ck * s1;
            ck = cn; sk = sn;
            const double ax = x_.cos_coeff(k), bx = x_.sin_coeff(k);
            const double ay = y_.cos_coeff(k), by = y_.sin_coeff(k);
            const double kk = static_cast<double>(k);
            j.position += Vec2{ax * ck + bx * sk, ay * ck + by * sk};
            j.velocity += Vec2{kk * (bx * ck - ax * sk), kk * (by * ck - ay * sk)};
            j.acceleration -= Vec2{kk * kk * (ax * ck + bx * sk), kk * kk * (ay * ck + by * sk)};
        }
        return j;
    }

private:
    Vec2 eval(double t, int order) const {
        const double tr = std::remainder(t, two_pi);
        const double c1 = std::cos(tr), s1 = std::sin(tr);
        double ck = 1.0, sk = 0.0;
        Vec2 out = order == 0 ? Vec2{x_.a0, y_.a0} : Vec2{};
        const std::size_t K = harmonics();
        for (std::size_t k = 1; k <= K; ++k) {
            const double cn = ck * c1 - sk * s1;
            const double sn = sk * c1 + ck * s1;
            ck = cn; sk = sn;
            const double ax = x_.cos_coeff(k), bx = x_.sin_coeff(k);
            const double ay = y_.cos_coeff(k), by = y_.sin_coeff(k);
            const double kk = static_cast<double>(k);
            switch (order) {
                case 0:
                    out += Vec2{ax * ck + bx * sk, ay * ck + by * sk};
                    break;
                case 1:
                    out += Vec2{kk * (bx * ck - ax * sk), kk * (by * ck - ay * sk)};
                    break;
                default:
                    out -= Vec2{kk * kk * (ax * ck + bx * sk), kk * kk * (ay * ck + by * sk)};
                    break;
            }
        }
        return out;
    }

    FourierCoeffs x_;
    FourierCoeffs y_;
};

inline ClosedCurve make_circle(double radius) {
    if (!(radius > 0.0)) throw validation_error("circle radius must be positive");
    FourierCoeffs x, y;
    x.a = {radius};
    y.b = {radius};
    return ClosedCurve(std::move(x), std::move(y));
}

// (cos t, b sin t): semi-axis 1 along x, b along y.
inline ClosedCurve make_ellipse(double b) {
    if (!(b > 0.0)) throw validation_error("ellipse semi-axis must be positive");
    FourierCoeffs cx, cy;
    cx.a = {1.0};
    cy.b = {b};
    return ClosedCurve(std::move(cx), std::move(cy));
}

inline ClosedCurve make_fourier(FourierCoeffs x, FourierCoeffs y) {
    return ClosedCurve(std::move(x), std::move(y));
}

struct SpeedAngle {
    double speed = 0.0;
    double angle = 0.0; // continuous lift of the tangent direction
};

namespace detail {

// Extends the tangent-angle lift from (t0, lift0) to t1. When the raw change
// exceeds pi/2 the winding is ambiguous, so the interval is bisected until
// each step is unambiguous.
inline double extend_tangent_lift(const ClosedCurve& curve, double t0, double lift0, double t1,
                                  int depth = 0) {
    Vec2 v = curve.derivative(t1);
    double speed = norm(v);
    if (!(speed > 0.0))
        throw numerical_error("curve has a stationary point near t=" + std::to_string(t1));
    double raw1 = std::atan2(v.y, v.x);
    double d = std::remainder(raw1 - lift0, two_pi);
    if (std::abs(d) < std::numbers::pi / 2.0 || t1 == t0) return lift0 + d;
    if (depth > 48)
        throw numerical_error("tangent angle refinement did not converge near t=" + std::to_string(t0));
    double tm = 0.5 * (t0 + t1);
    double liftm = extend_tangent_lift(curve, t0, lift0, tm, depth + 1);
    return extend_tangent_lift(curve, tm, liftm, t1, depth + 1);
}

} // namespace detail

// Speed and continuously lifted tangent angle along the given parameter grid.
// The lift starts from the principal angle in [-pi, pi) at t_grid[0] and is
// continued in grid order, refining internally wherever consecutive samples
// are too coarse.
inline std::vector<SpeedAngle> speed_and_angle(const ClosedCurve& curve,
                                               const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw validation_error("speed_and_angle: empty parameter grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw validation_error("speed_and_angle: parameter grid must be strictly increasing");
    std::vector<SpeedAngle> out(t_grid.size());
    Vec2 v0 = curve.derivative(t_grid[0]);
    double s0 = norm(v0);
    if (!(s0 > 0.0))
        throw numerical_error("curve has a stationary point near t=" + std::to_string(t_grid[0]));
    double raw0 = std::atan2(v0.y, v0.x);
    if (raw0 >= std::numbers::pi) raw0 -= two_pi;
    out[0] = {s0, raw0};
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        double lift = detail::extend_tangent_lift(curve, t_grid[i - 1], out[i - 1].angle, t_grid[i]);
        out[i] = {norm(curve.derivative(t_grid[i])), lift};
    }
    return out;
}

// Winding number of the tangent over one period.
inline int rotation_index(const ClosedCurve& curve) {
    const int n = 1024;
    std::vector<double> grid(n + 1);
    for (int i = 0; i <= n; ++i) grid[i] = two_pi * i / n;
    auto sa = speed_and_angle(curve, grid);
    double turn = (sa.back().angle - sa.front().angle) / two_pi;
    double rounded = std::round(turn);
    if (std::abs(turn - rounded) > 1e-6)
        throw numerical_error("tangent winding is not an integer: " + std::to_string(turn));
    return static_cast<int>(rounded);
}

namespace detail {

// Trapezoid rule for 2pi-periodic integrands, doubling the node count until
// the value settles. Spectrally accurate for smooth data.
template <class F>
double periodic_quadrature(F&& f, double rel_tol = 1e-10) {
    std::size_t n = 64;
    double h = two_pi / static_cast<double>(n);
    double sum = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = f(h * static_cast<double>(i));
        sum += v;
        abs_sum += std::abs(v);
    }
    double integral = sum * h;
    while (n < (1u << 20)) {
        double mid = 0.0, mid_abs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double v = f(h * (static_cast<double>(i) + 0.5));
            mid += v;
            mid_abs += std::abs(v);
        }
        n *= 2;
        h *= 0.5;
        sum += mid;
        abs_sum += mid_abs;
        double next = sum * h;
        // judge convergence against the L1 size of the integrand, not the
        // possibly cancelling value itself (a zero integral would otherwise
        // never settle)
        double scale = std::max({std::abs(next), abs_sum * h, 1e-300});
        if (std::abs(next - integral) <= rel_tol * scale) return next;
        integral = next;
    }
    throw numerical_error("periodic quadrature did not converge");
}

} // namespace detail

inline double perimeter(const ClosedCurve& curve) {
    return detail::periodic_quadrature([&](double t) { return norm(curve.derivative(t)); });
}

// Signed enclosed area, positive for counterclockwise travel. Computed as
// the x dy contour integral and cross-checked against -y dx.
inline double enclosed_area(const ClosedCurve& curve) {
    double a1 = detail::periodic_quadrature([&](double t) {
        return curve.evaluate(t).x * curve.derivative(t).y;
    });
    double a2 = detail::periodic_quadrature([&](double t) {
        return -curve.evaluate(t).y * curve.derivative(t).x;
    });
    if (std::abs(a1 - a2) > 1e-8 * std::max(1.0, std::abs(a1)))
        throw numerical_error("the two contour-integral forms of the area disagree: " +
                              std::to_string(a1) + " vs " + std::to_string(a2));
    return a1;
}

inline double curvature(const ClosedCurve& curve, double t) {
    Jet2 j = curve.jet2(t);
    double speed = norm(j.velocity);
    if (!(speed > 0.0))
        throw numerical_error("curvature undefined at a stationary point, t=" + std::to_string(t));
    return cross(j.velocity, j.acceleration) / (speed * speed * speed);
}

struct RadiusOfCurvatureExtrema {
    double min_radius = 0.0;
    double max_radius = 0.0;
    bool bounded = true; // false when the curvature changes sign or vanishes
};

// Extrema of 1/|kappa| over one period, from a 4096-point grid with local
// parabolic polish. A sign change or near-zero of kappa means the radius of
// curvature is unbounded; min_radius is still reported.
inline RadiusOfCurvatureExtrema radius_of_curvature_extrema(const ClosedCurve& curve) {
    const int n = 4096;
    std::vector<double> kap(n);
    bool sign_change = false, tiny = false;
    for (int i = 0; i < n; ++i) kap[i] = curvature(curve, two_pi * i / n);
    for (int i = 0; i < n; ++i) {
        if (kap[i] * kap[(i + 1) % n] < 0.0) sign_change = true;
        if (std::abs(kap[i]) < 1e-12) tiny = true;
    }
    RadiusOfCurvatureExtrema out;
    out.bounded = !sign_change && !tiny;

    double k_lo = std::numeric_limits<double>::infinity();
    double k_hi = 0.0;
    auto polish = [&](int i) {
        int im = (i + n - 1) % n, ip = (i + 1) % n;
        double fm = std::abs(kap[im]), f0 = std::abs(kap[i]), fp = std::abs(kap[ip]);
        double denom = fm - 2.0 * f0 + fp;
        double dt = 0.0;
        if (std::abs(denom) > 1e-300) dt = 0.5 * (fm - fp) / denom;
        dt = std::clamp(dt, -1.0, 1.0);
        return std::abs(curvature(curve, two_pi * (i + dt) / n));
    };
    for (int i = 0; i < n; ++i) {
        double fm = std::abs(kap[(i + n - 1) % n]);
        double f0 = std::abs(kap[i]);
        double fp = std::abs(kap[(i + 1) % n]);
        if (f0 >= fm && f0 >= fp) k_hi = std::max(k_hi, polish(i));
        if (f0 <= fm && f0 <= fp) k_lo = std::min(k_lo, polish(i));
    }
    out.min_radius = 1.0 / k_hi;
    out.max_radius = out.bounded ? 1.0 / k_lo : std::numeric_limits<double>::infinity();
    return out;
}

struct CurveMetrics {
    double perimeter = 0.0;
    double area = 0.0; // signed
    int rotation_index = 0;
    double min_radius_of_curvature = 0.0;
    double max_radius_of_curvature = 0.0;
    bool curvature_bounded_away_from_zero = true;
    double min_speed = 0.0;
    double max_speed = 0.0;

    double mean_radius() const { return perimeter / two_pi; }
};

inline CurveMetrics compute_metrics(const ClosedCurve& curve) {
    CurveMetrics m;
    m.perimeter = perimeter(curve);
    m.area = enclosed_area(curve);
    m.rotation_index = rotation_index(curve);
    auto ext = radius_of_curvature_extrema(curve);
    m.min_radius_of_curvature = ext.min_radius;
    m.max_radius_of_curvature = ext.max_radius;
    m.curvature_bounded_away_from_zero = ext.bounded;
    const int n = 4096;
    m.min_speed = std::numeric_limits<double>::infinity();
    m.max_speed = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = norm(curve.derivative(two_pi * i / n));
        m.min_speed = std::min(m.min_speed, s);
        m.max_speed = std::max(m.max_speed, s);
    }
    return m;
}

// Point of the parallel curve at signed offset d: the base point displaced
// along the outward unit normal (tangent rotated by -pi/2, which points away
// from the enclosed region for counterclockwise curves).
inline Vec2 parallel_curve_point(const ClosedCurve& curve, double d, double t) {
    Vec2 v = curve.derivative(t);
    double speed = norm(v);
    if (!(speed > 0.0))
        throw numerical_error("parallel curve undefined at a stationary point, t=" + std::to_string(t));
    Vec2 n{v.y / speed, -v.x / speed};
    return curve.evaluate(t) + d * n;
}

inline ClosedCurve dilated(const ClosedCurve& c, double s) {
    if (!(s > 0.0)) throw validation_error("dilation factor must be positive");
    auto scale = [s](FourierCoeffs f) {
        f.a0 *= s;
        for (double& v : f.a) v *= s;
        for (double& v : f.b) v *= s;
        return f;
    };
    return ClosedCurve(scale(c.x()), scale(c.y()));
}

inline ClosedCurve translated(const ClosedCurve& c, Vec2 offset) {
    FourierCoeffs x = c.x(), y = c.y();
    x.a0 += offset.x;
    y.a0 += offset.y;
    return ClosedCurve(std::move(x), std::move(y));
}

// Rigid rotation of the image about the origin by angle beta.
inline ClosedCurve rotated(const ClosedCurve& c, double beta) {
    const double cb = std::cos(beta), sb = std::sin(beta);
    FourierCoeffs x = c.x(), y = c.y();
    auto rot = [&](double& vx, double& vy) {
        double nx = cb * vx - sb * vy;
        double ny = sb * vx + cb * vy;
        vx = nx;
        vy = ny;
    };
    rot(x.a0, y.a0);
    std::size_t K = c.harmonics();
    x.a.resize(K, 0.0); x.b.resize(K, 0.0);
    y.a.resize(K, 0.0); y.b.resize(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        rot(x.a[k], y.a[k]);
        rot(x.b[k], y.b[k]);
    }
    return ClosedCurve(std::move(x), std::move(y));
}

// Parameter shift t -> t + beta (same image, new time origin).
inline ClosedCurve time_shifted(const ClosedCurve& c, double beta) {
    auto shift = [beta](const FourierCoeffs& f) {
        FourierCoeffs g;
        g.a0 = f.a0;
        std::size_t K = f.harmonics();
        g.a.resize(K, 0.0);
        g.b.resize(K, 0.0);
        for (std::size_t k = 1; k <= K; ++k) {
            double ck = std::cos(k * beta), sk = std::sin(k * beta);
            double a = f.cos_coeff(k), b = f.sin_coeff(k);
            g.a[k - 1] = a * ck + b * sk;
            g.b[k - 1] = b * ck - a * sk;
        }
        return g;
    };
    return ClosedCurve(shift(c.x()), shift(c.y()));
}

// Refit the curve so the new parameter is proportional to arclength: the new
// speed is constant at perimeter/(2 pi). The image is preserved up to the
// truncation error of the K_out harmonic refit; both the residual speed
// variation and the positional deviation are verified before returning.
inline ClosedCurve normalized_arclength_reparam(const ClosedCurve& curve, std::size_t K_out) {
    const std::size_t M = 4096;
    if (K_out == 0 || K_out >= M / 2)
        throw validation_error("reparameterization harmonic count must be in [1, 2047]");

    // Cumulative arclength on a uniform grid, one 8-point Gauss-Legendre
    // panel per cell.
    static const double gl_x[4] = {0.1834346424956498, 0.5255324099163290,
                                   0.7966664774136267, 0.9602898564975363};
    static const double gl_w[4] = {0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};
    std::vector<double> S(M + 1, 0.0);
    const double h = two_pi / static_cast<double>(M);
    for (std::size_t i = 0; i < M; ++i) {
        double t0 = h * static_cast<double>(i);
        double mid = t0 + 0.5 * h, half = 0.5 * h;
        double acc = 0.0;
        for (int q = 0; q < 4; ++q) {
            acc += gl_w[q] * norm(curve.derivative(mid - half * gl_x[q]));
            acc += gl_w[q] * norm(curve.derivative(mid + half * gl_x[q]));
        }
        S[i + 1] = S[i] + acc * half;
    }
    const double length = S[M];
    if (!(length > 0.0)) throw numerical_error("curve has zero length");

    // Invert s(t) at M equally spaced arclength targets.
    std::vector<Vec2> samples(M);
    std::size_t cell = 0;
    for (std::size_t j = 0; j < M; ++j) {
        double target = length * static_cast<double>(j) / static_cast<double>(M);
        while (cell + 1 < M && S[cell + 1] < target) ++cell;
        const double t_cell = h * static_cast<double>(cell);
        const double s_cell = S[cell];
        // s restricted to this cell, one GL panel from the left edge.
        auto s_local = [&](double t) {
            double mid = 0.5 * (t_cell + t), half = 0.5 * (t - t_cell);
            double acc = 0.0;
            for (int q = 0; q < 4; ++q) {
                acc += gl_w[q] * norm(curve.derivative(mid - half * gl_x[q]));
                acc += gl_w[q] * norm(curve.derivative(mid + half * gl_x[q]));
            }
            return s_cell + acc * half;
        };
        double blo = t_cell, bhi = t_cell + h;
        double t = t_cell + h * (target - s_cell) / std::max(S[cell + 1] - s_cell, 1e-300);
        t = std::clamp(t, blo, bhi);
        for (int it = 0; it < 60; ++it) {
            double f = s_local(t) - target;
            if (std::abs(f) <= 1e-13 * length) break;
            if (f > 0.0) bhi = t;
            else blo = t;
            double fp = norm(curve.derivative(t));
            double t_next = fp > 0.0 ? t - f / fp : 0.5 * (blo + bhi);
            if (!(t_next > blo && t_next < bhi)) t_next = 0.5 * (blo + bhi);
            t = t_next;
        }
        samples[j] = curve.evaluate(t);
    }

    // Discrete Fourier refit of the resampled positions.
    FourierCoeffs fx, fy;
    fx.a.assign(K_out, 0.0); fx.b.assign(K_out, 0.0);
    fy.a.assign(K_out, 0.0); fy.b.assign(K_out, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        fx.a0 += samples[j].x;
        fy.a0 += samples[j].y;
    }
    fx.a0 /= static_cast<double>(M);
    fy.a0 /= static_cast<double>(M);
    for (std::size_t k = 1; k <= K_out; ++k) {
        double ca = 0, cb = 0, cc = 0, cd = 0;
        for (std::size_t j = 0; j < M; ++j) {
            double ang = two_pi * static_cast<double>(k * j % M) / static_cast<double>(M);
            double cj = std::cos(ang), sj = std::sin(ang);
            ca += samples[j].x * cj;
            cb += samples[j].x * sj;
            cc += samples[j].y * cj;
            cd += samples[j].y * sj;
        }
        fx.a[k - 1] = 2.0 * ca / static_cast<double>(M);
        fx.b[k - 1] = 2.0 * cb / static_cast<double>(M);
        fy.a[k - 1] = 2.0 * cc / static_cast<double>(M);
        fy.b[k - 1] = 2.0 * cd / static_cast<double>(M);
    }
    ClosedCurve result(std::move(fx), std::move(fy));

    // Verify the refit: constant speed and positional agreement.
    const double c_speed = length / two_pi;
    double worst_speed = 0.0, worst_pos = 0.0, scale = 1.0;
    for (const Vec2& p : samples) scale = std::max(scale, norm(p));
    for (std::size_t j = 0; j < M; ++j) {
        double u = two_pi * static_cast<double>(j) / static_cast<double>(M);
        worst_speed = std::max(worst_speed, std::abs(norm(result.derivative(u)) - c_speed) / c_speed);
        worst_pos = std::max(worst_pos, distance(result.evaluate(u), samples[j]) / scale);
    }
    if (worst_speed > 1e-6 || worst_pos > 1e-6)
        throw numerical_error(
            "arclength refit with " + std::to_string(K_out) + " harmonics is too coarse: speed deviation " +
            std::to_string(worst_speed) + ", position deviation " + std::to_string(worst_pos));
    return result;
}

} // namespace shadowing

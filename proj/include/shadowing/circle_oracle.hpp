#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "shadowing/errors.hpp"
#include "shadowing/vec2.hpp"

// Closed-form solutions of the chord dynamics when the base curve is the
// unit circle (cos t, sin t). In the co-rotating angle phi = theta - t the
// equation separates, so every regime of the chord length R has an explicit
// solution. These are the reference values the integrators are tested against.

namespace shadowing {

struct CircleRegime {
    enum class Kind { small, critical, large };
    double R = 0.0;
    Kind kind = Kind::small;
    // Auxiliary frequency -sqrt(R^2-1)/R of the co-rotating angle, in (-1, 0)
    // for the large regime and zero otherwise.
    double rho_R = 0.0;
};

inline double rotation_number_circle(double R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw validation_error("R must be positive and finite");
    if (R <= 1.0) return 1.0;
    return 1.0 - std::sqrt(R * R - 1.0) / R;
}

inline CircleRegime circle_regime(double R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw validation_error("R must be positive and finite");
    CircleRegime out;
    out.R = R;
    out.rho_R = R > 1.0 ? -std::sqrt(R * R - 1.0) / R : 0.0;
    out.kind = R < 1.0   ? CircleRegime::Kind::small
               : R > 1.0 ? CircleRegime::Kind::large
                         : CircleRegime::Kind::critical;
    return out;
}

// {attracting, repelling} rest angles of the co-rotating dynamics, R < 1.
inline std::pair<double, double> equilibria(double R) {
    if (!(R > 0.0 && R < 1.0))
        throw validation_error("equilibria exist only for 0 < R < 1");
    double a = std::numbers::pi / 2.0 + std::asin(R);
    return {-a, a};
}

namespace detail {

inline double guarded_atanh(double x, const char* what) {
    if (!(std::abs(x) < 1.0))
        throw numerical_error(std::string("argument of atanh left (-1,1) in ") + what +
                              "; the initial angle sits at an equilibrium");
    return std::atanh(x);
}

} // namespace detail

// Signed time of the chord alignment (phi crossing a multiple of pi) for
// R < 1. Negative values mean the alignment happened before t = 0. Initial
// angles at the rest points never align and are rejected.
inline double turning_time_small_R(double R, double theta0) {
    auto [lo, hi] = equilibria(R); // lo = attractor, hi = repeller
    double u = lo + std::fmod(theta0 - lo, 2.0 * std::numbers::pi);
    if (u < lo) u += 2.0 * std::numbers::pi;
    const double s = std::sqrt(1.0 - R * R);
    const double c = std::sqrt((1.0 - R) / (1.0 + R));
    if (std::abs(u - lo) < 1e-13 || std::abs(u - hi) < 1e-13 ||
        std::abs(u - (lo + 2.0 * std::numbers::pi)) < 1e-13)
        throw validation_error("theta0 is a rest angle; the chord never aligns");
    if (u < hi) // inner basin, alignment at phi = 0
        return (2.0 * R / s) * detail::guarded_atanh(c * std::tan(0.5 * u), "turning_time_small_R");
    // outer basin, alignment at phi = pi
    return (2.0 * R / s) * detail::guarded_atanh(std::cos(0.5 * u) / (c * std::sin(0.5 * u)),
                                                 "turning_time_small_R");
}

// Driven point at the critical chord length R = 1, in closed form. The rest
// angle theta0 = +-pi corresponds to the constant solution at the origin and
// is rejected rather than silently returned.
inline Vec2 sc_at_R_equal_1(double theta0, double t) {
    double u = std::remainder(theta0, 2.0 * std::numbers::pi);
    if (std::abs(std::abs(u) - std::numbers::pi) < 1e-13)
        throw validation_error("theta0 = pi gives the constant solution pinned at the origin");
    using cplx = std::complex<double>;
    const cplx I(0.0, 1.0);
    const double c0 = std::cos(u);
    const double ch = std::cos(0.5 * u);
    cplx numer = 1.0 + std::exp(I * u) - I * t * (c0 + 1.0);
    double denom = 1.0 - t * std::sin(u) + t * t * ch * ch;
    cplx r = std::exp(I * t) * numer / denom;
    return {r.real(), r.imag()};
}

inline double turning_time_R1(double theta0) {
    double u = std::remainder(theta0, 2.0 * std::numbers::pi);
    if (std::abs(std::abs(u) - std::numbers::pi) < 1e-13)
        throw validation_error("theta0 is the rest angle at R = 1; the chord never aligns");
    return std::tan(0.5 * u);
}

// Time as a function of the co-rotating angle for R > 1: F is strictly
// decreasing with F(phi(t)) = F(phi(0)) + t, and jumps across odd multiples
// of pi are glued with the branch rule F(phi + 2 pi k) = F(phi) + 2 pi k / rho_aux.
inline double circle_F(double R, double phi) {
    if (!(R > 1.0)) throw validation_error("circle_F requires R > 1");
    const double rho_aux = -std::sqrt(R * R - 1.0) / R;
    const double g = std::sqrt((R - 1.0) / (R + 1.0));
    double w = std::remainder(phi, 2.0 * std::numbers::pi);
    double k = std::round((phi - w) / (2.0 * std::numbers::pi));
    return (2.0 / rho_aux) * std::atan(g * std::tan(0.5 * w)) +
           2.0 * std::numbers::pi * k / rho_aux;
}

inline double circle_F_inverse(double R, double v) {
    if (!(R > 1.0)) throw validation_error("circle_F_inverse requires R > 1");
    const double rho_aux = -std::sqrt(R * R - 1.0) / R;
    const double g = std::sqrt((R - 1.0) / (R + 1.0));
    // v at a branch edge maps to an odd multiple of pi; the tangent-based
    // formula and the bracketing below both degenerate there, so return the
    // edge directly
    double m = std::round(v * rho_aux / std::numbers::pi);
    if (std::abs(v * rho_aux / std::numbers::pi - m) < 1e-9 &&
        std::abs(std::remainder(m, 2.0)) == 1.0)
        return m * std::numbers::pi;
    double k = std::round(v * rho_aux / (2.0 * std::numbers::pi));
    double w = v - 2.0 * std::numbers::pi * k / rho_aux;
    double phi = 2.0 * std::atan(std::tan(0.5 * rho_aux * w) / g) + 2.0 * std::numbers::pi * k;
    double resid = std::abs(circle_F(R, phi) - v);
    if (resid <= 1e-9 * std::max(1.0, std::abs(v))) return phi;
    // Rounding put us on the wrong branch edge; fall back to bisection on the
    // decreasing F over the bracketing branch.
    double lo = 2.0 * std::numbers::pi * k - std::numbers::pi + 1e-15;
    double hi = 2.0 * std::numbers::pi * k + std::numbers::pi - 1e-15;
    for (double shift : {-1.0, 0.0, 1.0}) {
        double l = lo + 2.0 * std::numbers::pi * shift;
        double h = hi + 2.0 * std::numbers::pi * shift;
        if ((circle_F(R, l) - v) * (circle_F(R, h) - v) <= 0.0) {
            for (int i = 0; i < 200; ++i) {
                double mid = 0.5 * (l + h);
                if ((circle_F(R, l) - v) * (circle_F(R, mid) - v) <= 0.0) h = mid;
                else l = mid;
            }
            return 0.5 * (l + h);
        }
    }
    throw numerical_error("circle_F_inverse could not bracket the requested value");
}

inline double circle_phi_of_t(double R, double theta0, double t) {
    return circle_F_inverse(R, circle_F(R, theta0) + t);
}

// theta(t) for the unit-circle base at any chord length, with theta(0) = theta0.
inline double theta_oracle_circle(double R, double theta0, double t) {
    if (!(R > 0.0) || !std::isfinite(R)) throw validation_error("R must be positive and finite");
    if (R > 1.0) return t + circle_phi_of_t(R, theta0, t);
    if (R == 1.0) {
        double u = std::remainder(theta0, 2.0 * std::numbers::pi);
        double m = theta0 - u;
        if (std::abs(std::abs(u) - std::numbers::pi) < 1e-13) return t + u + m;
        return t + 2.0 * std::atan(std::tan(0.5 * u) - t) + m;
    }
    auto [lo, hi] = equilibria(R);
    double u = lo + std::fmod(theta0 - lo, 2.0 * std::numbers::pi);
    if (u < lo) u += 2.0 * std::numbers::pi;
    double m = theta0 - u;
    const double s = std::sqrt(1.0 - R * R);
    const double c = std::sqrt((1.0 - R) / (1.0 + R));
    const double rate = 0.5 * s / R;
    double phi;
    if (std::abs(u - lo) < 1e-13 || std::abs(u - (lo + 2.0 * std::numbers::pi)) < 1e-13) {
        phi = u;
    } else if (std::abs(u - hi) < 1e-13) {
        phi = u;
    } else if (u < hi) {
        double V0 = detail::guarded_atanh(c * std::tan(0.5 * u), "theta_oracle_circle");
        phi = 2.0 * std::atan(std::tanh(V0 - rate * t) / c);
    } else {
        double W0 = detail::guarded_atanh(std::cos(0.5 * u) / (c * std::sin(0.5 * u)),
                                          "theta_oracle_circle");
        phi = std::numbers::pi - 2.0 * std::atan(c * std::tanh(W0 - rate * t));
    }
    return t + phi + m;
}

struct CircleTurningPoint {
    double time = 0.0;
    Vec2 location;
    bool outer = true;    // even alignment: the far side of the chord circle
    long phi_level = 0;   // phi at the alignment is phi_level * pi
};

// Chord alignments tau_k = tau_0 + k pi R / sqrt(R^2-1) for k in
// [k_min, k_max], R > 1. They alternate between the outer and inner parallel
// circles of radii R + 1 and R - 1.
inline std::vector<CircleTurningPoint> turning_data_large_R(double R, double theta0, long k_min,
                                                            long k_max) {
    if (!(R > 1.0)) throw validation_error("turning_data_large_R requires R > 1");
    if (k_min > k_max) throw validation_error("empty index range");
    const double spacing = std::numbers::pi * R / std::sqrt(R * R - 1.0);
    const double base = -circle_F(R, theta0);
    std::vector<CircleTurningPoint> out;
    for (long k = k_min; k <= k_max; ++k) {
        CircleTurningPoint p;
        p.time = base + static_cast<double>(k) * spacing;
        p.outer = (k % 2 + 2) % 2 == 0;
        p.phi_level = -k;
        double radial = p.outer ? 1.0 + R : 1.0 - R;
        p.location = {radial * std::cos(p.time), radial * std::sin(p.time)};
        out.push_back(p);
    }
    return out;
}

// Chord length at which the rotation number locks to (p - q) / p, p > q >= 1
// coprime: the closed orbit then has minimal period 2 pi p and 2 q alignments
// per period.
inline double subharmonic_distance(int p, int q) {
    if (q < 1 || p <= q) throw validation_error("subharmonic indices need p > q >= 1");
    if (std::gcd(p, q) != 1) throw validation_error("subharmonic indices must be coprime");
    double pp = static_cast<double>(p);
    double qq = static_cast<double>(q);
    return pp / std::sqrt(pp * pp - qq * qq);
}

} // namespace shadowing

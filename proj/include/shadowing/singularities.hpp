#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "shadowing/curve.hpp"
#include "shadowing/dynamics.hpp"
#include "shadowing/errors.hpp"
#include "shadowing/integrate.hpp"
#include "shadowing/rotation.hpp"

namespace shadowing {

struct CuspEvent {
    enum class Branch { outer, inner };
    double time = 0.0;
    Vec2 location;
    Branch branch = Branch::outer;
    double second_derivative_norm = 0.0;
    long phi_level = 0; // phi(time) = phi_level * pi
};

namespace detail {

// Hermite-interpolated theta between two trajectory nodes.
struct ThetaInterp {
    double t0, th0, f0, t1, th1, f1;
    double operator()(double t) const { return hermite_value(t0, th0, f0, t1, th1, f1, t); }
};

inline double raw_tangent_angle(const ClosedCurve& curve, double t) {
    Vec2 v = curve.derivative(t);
    return std::atan2(v.y, v.x);
}

} // namespace detail

// Locate every chord alignment along the trajectory: zeros of
// cos(theta - psi), equivalently of alpha, bracketed by sign changes between
// samples and polished by bisection. Branch parity comes from the lifted
// phi = theta - psi + pi/2, which is an integer multiple of pi at each event.
inline std::vector<CuspEvent> detect_singular_times(const ClosedCurve& curve,
                                                    const Trajectory& traj) {
    if (traj.size() == 0) throw validation_error("empty trajectory");
    if (traj.alpha.size() != traj.size())
        throw validation_error("trajectory is missing its alpha samples");
    // phi_lift also validates that the trajectory belongs to this curve;
    // cos(theta - psi) = sin(phi) since phi = theta - psi + pi/2.
    std::vector<double> phi = phi_lift(curve, traj);
    auto sa = speed_and_angle(curve, traj.t);

    const double R = traj.R;
    const std::size_t n = traj.size();
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = std::sin(phi[i]);

    const double node_tol = 1e-12;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs(c[i]) <= node_tol && std::abs(c[i + 1]) <= node_tol)
            throw numerical_error("alignment function vanishes over an interval near t=" +
                                  std::to_string(traj.t[i]) + "; degenerate configuration");

    std::vector<CuspEvent> events;
    auto emit = [&](double t_star, double theta_star, double psi_anchor_angle) {
        // Lift psi at t_star from the nearest node's lifted value.
        double raw = detail::raw_tangent_angle(curve, t_star);
        double psi_star = psi_anchor_angle + std::remainder(raw - psi_anchor_angle, two_pi);
        double phi_star = theta_star - psi_star + 0.5 * std::numbers::pi;
        long k = std::lround(phi_star / std::numbers::pi);
        if (std::abs(phi_star - k * std::numbers::pi) > 1e-6)
            throw numerical_error("alignment at t=" + std::to_string(t_star) +
                                  " is not at an integer phi level");
        double a = alpha(curve, R, t_star, theta_star);
        if (std::abs(a) >= 1e-9)
            throw numerical_error("polished alignment at t=" + std::to_string(t_star) +
                                  " has |alpha| = " + std::to_string(std::abs(a)));
        CuspEvent ev;
        ev.time = t_star;
        ev.location = curve.evaluate(t_star) +
                      R * Vec2{std::cos(theta_star), std::sin(theta_star)};
        ev.phi_level = k;
        ev.branch = ((k % 2 + 2) % 2 == 0) ? CuspEvent::Branch::outer : CuspEvent::Branch::inner;
        double B = norm(curve.derivative(t_star));
        double psi_rate = curvature(curve, t_star) * B;
        double F = -(B / R) * std::cos(phi_star) - psi_rate;
        ev.second_derivative_norm = B * std::abs(F);
        events.push_back(ev);
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(c[i]) <= node_tol) {
            emit(traj.t[i], traj.theta[i], sa[i].angle);
            continue;
        }
        if (i + 1 >= n) break;
        if (std::abs(c[i + 1]) <= node_tol) continue; // handled as a node root next iteration
        if (c[i] * c[i + 1] > 0.0) continue;

        detail::ThetaInterp th{traj.t[i],     traj.theta[i],     traj.dtheta[i],
                               traj.t[i + 1], traj.theta[i + 1], traj.dtheta[i + 1]};
        auto g = [&](double t) { return std::cos(th(t) - detail::raw_tangent_angle(curve, t)); };
        double lo = traj.t[i], hi = traj.t[i + 1];
        double glo = c[i];
        while (hi - lo > 1e-12) {
            double mid = 0.5 * (lo + hi);
            double gm = g(mid);
            if (glo * gm <= 0.0) hi = mid;
            else {
                lo = mid;
                glo = gm;
            }
        }
        double t_star = 0.5 * (lo + hi);
        emit(t_star, th(t_star), sa[i].angle);
    }
    return events;
}

enum class CuspClass { ordinary, degenerate };

// Cross-check the curvature-formula second derivative against a finite
// difference of the reconstructed velocity, then classify by its norm.
inline CuspClass classify_cusp(const ClosedCurve& curve, double R, const CuspEvent& event) {
    detail::validate_R(R);
    Vec2 d = event.location - curve.evaluate(event.time);
    if (std::abs(norm(d) - R) > 1e-6 * std::max(1.0, R))
        throw validation_error("event location is not at distance R from the base curve");
    const double theta_star = std::atan2(d.y, d.x);
    const double t_star = event.time;

    // velocity of the driven point expressed through (t, theta)
    auto velocity = [&](double t, double theta) {
        double a = alpha(curve, R, t, theta);
        return Vec2{-a * R * std::cos(theta), -a * R * std::sin(theta)};
    };
    auto rhs = [&](double t, const std::array<double, 1>& y, std::array<double, 1>& dy) {
        dy[0] = rse_rhs(curve, R, t, y[0]);
    };
    // central-difference step: truncation error ~ (h^2/6) |r''''| must stay
    // well under the degenerate gate below even when r'' vanishes exactly
    const double h = 2e-4;
    auto theta_at = [&](double t_target) {
        std::array<double, 1> y{theta_star};
        double out = theta_star;
        detail::integrate_fixed_rk4<1>(rhs, y, t_star, t_target, 16,
                                       [&](double, const std::array<double, 1>& s,
                                           const std::array<double, 1>&) { out = s[0]; });
        return out;
    };
    Vec2 v_plus = velocity(t_star + h, theta_at(t_star + h));
    Vec2 v_minus = velocity(t_star - h, theta_at(t_star - h));
    double fd_norm = norm((v_plus - v_minus) / (2.0 * h));

    const double an = event.second_derivative_norm;
    if (an > 1e-6) {
        if (std::abs(fd_norm - an) > 1e-4 * an)
            throw numerical_error("second-derivative formula and finite difference disagree: " +
                                  std::to_string(an) + " vs " + std::to_string(fd_norm));
        return CuspClass::ordinary;
    }
    if (fd_norm > 2e-6)
        throw numerical_error("formula says degenerate but finite difference gives " +
                              std::to_string(fd_norm));
    return CuspClass::degenerate;
}

struct CuspCountReport {
    enum class Regime { below_plateau, above_max, unsupported };
    Regime regime = Regime::unsupported;
    bool asserted = false;   // the counting theorem's hypotheses were met
    bool consistent = false; // observed counts match the asserted ones
    int p = 0, q = 0;        // rho = omega0 - q/p when asserted in the outer regime
    double minimal_period = 0.0;
    int n_events = 0, n_outer = 0, n_inner = 0;
    std::vector<CuspEvent> events;
    std::string note;
};

namespace detail {

inline int count_distinct_locations(const std::vector<const CuspEvent*>& evs, double tol,
                                    int* outer, int* inner) {
    std::vector<const CuspEvent*> reps;
    for (const CuspEvent* e : evs) {
        bool fresh = true;
        for (const CuspEvent* r : reps)
            if (distance(e->location, r->location) <= tol) {
                fresh = false;
                break;
            }
        if (fresh) reps.push_back(e);
    }
    *outer = *inner = 0;
    for (const CuspEvent* r : reps)
        (r->branch == CuspEvent::Branch::outer ? *outer : *inner) += 1;
    return static_cast<int>(reps.size());
}

} // namespace detail

// Count distinct cusps against the two counting statements: at most one when
// the chord is shorter than every radius of curvature, and exactly 2q per
// minimal period 2 p pi when it exceeds every radius of curvature and the
// rotation number resolves to omega0 - q/p. Outside those regimes the report
// declines to assert anything.
inline CuspCountReport count_cusps_per_period(const ClosedCurve& curve, double R, double theta0,
                                              const IntegrationConfig& cfg = {}) {
    detail::validate_R(R);
    if (!std::isfinite(theta0)) throw validation_error("theta0 must be finite");
    cfg.validate();
    CuspCountReport rep;

    auto ext = radius_of_curvature_extrema(curve);
    int omega0 = rotation_index(curve);
    bool convex = ext.bounded && std::abs(omega0) == 1;

    auto fill_counts = [&](const std::vector<CuspEvent>& evs, double t_end_exclusive) {
        std::vector<const CuspEvent*> kept;
        for (const CuspEvent& e : evs)
            if (e.time < t_end_exclusive - 1e-9) kept.push_back(&e);
        rep.n_events = detail::count_distinct_locations(kept, 1e-6, &rep.n_outer, &rep.n_inner);
    };

    if (convex && R < ext.min_radius) {
        rep.regime = CuspCountReport::Regime::below_plateau;
        Trajectory traj = integrate_rse(curve, R, theta0, {-10.0 * two_pi, 10.0 * two_pi}, cfg);
        rep.events = detect_singular_times(curve, traj);
        fill_counts(rep.events, std::numeric_limits<double>::infinity());
        rep.asserted = true;
        rep.consistent = rep.n_events <= 1;
        rep.note = "short-chord regime: at most one alignment on the whole trajectory";
        return rep;
    }

    if (convex && R > ext.max_radius) {
        rep.regime = CuspCountReport::Regime::above_max;
        RotationEstimate est = rotation_number(curve, R, 512, detail::scan_config());
        double x = static_cast<double>(omega0) - est.value;
        for (int p = 2; p <= 64; ++p) {
            int q = static_cast<int>(std::lround(x * p));
            if (q < 1 || q >= p || std::gcd(p, q) != 1) continue;
            if (std::abs(x - static_cast<double>(q) / p) <= 2.0 * est.error_bound) {
                rep.p = p;
                rep.q = q;
                break;
            }
        }
        if (rep.p == 0) {
            rep.asserted = false;
            rep.note = "rotation number does not resolve to a rational with denominator <= 64";
            return rep;
        }
        rep.minimal_period = 2.0 * std::numbers::pi * rep.p;
        Trajectory traj = integrate_rse(curve, R, theta0, {0.0, rep.minimal_period}, cfg);
        rep.events = detect_singular_times(curve, traj);
        fill_counts(rep.events, rep.minimal_period);
        rep.asserted = true;
        rep.consistent = rep.n_events == 2 * rep.q && rep.n_outer == rep.q && rep.n_inner == rep.q;
        rep.note = "long-chord regime: expected exactly 2q distinct cusps, q per branch";
        return rep;
    }

    rep.regime = CuspCountReport::Regime::unsupported;
    rep.asserted = false;
    Trajectory traj = integrate_rse(curve, R, theta0, {0.0, 10.0 * two_pi}, cfg);
    rep.events = detect_singular_times(curve, traj);
    fill_counts(rep.events, std::numeric_limits<double>::infinity());
    rep.note = convex ? "hypothesis boundary: R lies in the span of the radii of curvature"
                      : "counting theorems need a convex curve with bounded curvature radii";
    return rep;
}

} // namespace shadowing

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "shadowing/curve.hpp"
#include "shadowing/errors.hpp"
#include "shadowing/integrate.hpp"
#include "shadowing/vec2.hpp"

namespace shadowing {

// Angular form of the pursuit dynamics: theta is the direction of the chord
// from the moving base point to the driven point, which stays at distance R.
inline double rse_rhs(const ClosedCurve& curve, double R, double t, double theta) {
    Vec2 v = curve.derivative(t);
    return (v.x * std::sin(theta) - v.y * std::cos(theta)) / R;
}

// Instantaneous logarithmic expansion rate along a chord direction. Positive
// when the driven point currently recedes ahead of the base point's motion.
inline double alpha(const ClosedCurve& curve, double R, double t, double theta) {
    Vec2 v = curve.derivative(t);
    return -(v.x * std::cos(theta) + v.y * std::sin(theta)) / R;
}

namespace detail {

inline double max_speed(const ClosedCurve& curve) {
    const int n = 2048;
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, norm(curve.derivative(two_pi * i / n)));
    return m;
}

// Effective uniform step count per period. The configured density is a
// floor; it is raised when the angular velocity bound B_max/R would otherwise
// let consecutive samples jump by more than pi/2.
inline long steps_per_period_for(const IntegrationConfig& cfg, double B_max, double R) {
    double needed = 4.0 * B_max / R;
    double spp = std::max(static_cast<double>(cfg.steps_per_period), needed);
    return static_cast<long>(std::ceil(spp));
}

template <class Obs>
void run_theta_leg(const ClosedCurve& curve, double R, double theta_start, double t0, double t1,
                   const IntegrationConfig& cfg, double B_max, Obs&& obs) {
    auto rhs = [&](double t, const std::array<double, 1>& y, std::array<double, 1>& dy) {
        dy[0] = rse_rhs(curve, R, t, y[0]);
    };
    std::array<double, 1> y0{theta_start};
    if (cfg.method == Method::rk4_fixed) {
        long spp = steps_per_period_for(cfg, B_max, R);
        long n = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t1 - t0) / two_pi *
                                                               static_cast<double>(spp))));
        detail::integrate_fixed_rk4<1>(rhs, y0, t0, t1, n,
                                       [&](double t, const std::array<double, 1>& y,
                                           const std::array<double, 1>& dy) { obs(t, y[0], dy[0]); });
    } else {
        IntegrationConfig local = cfg;
        double cap = 0.5 * std::numbers::pi * R / std::max(B_max, 1e-300);
        local.max_step = local.max_step > 0.0 ? std::min(local.max_step, cap) : cap;
        detail::integrate_rk45<1>(rhs, y0, t0, t1, local,
                                  [&](double t, const std::array<double, 1>& y,
                                      const std::array<double, 1>& dy) { obs(t, y[0], dy[0]); });
    }
}

// Advance the chord angle from (t0, theta) to t1 without recording samples.
inline double advance_theta(const ClosedCurve& curve, double R, double theta, double t0, double t1,
                            const IntegrationConfig& cfg, double B_max) {
    if (t0 == t1) return theta;
    double out = theta;
    run_theta_leg(curve, R, theta, t0, t1, cfg, B_max,
                  [&](double, double th, double) { out = th; });
    return out;
}

inline void validate_R(double R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw validation_error("chord length R must be positive and finite");
}

inline void validate_span(std::pair<double, double> span) {
    if (!std::isfinite(span.first) || !std::isfinite(span.second))
        throw validation_error("time span must be finite");
    if (!(span.first <= span.second))
        throw validation_error("time span must satisfy a <= b");
}

} // namespace detail

// Sampled solution of the angular dynamics. The angle column is a continuous
// lift, positions are reconstructed on the chord circle of radius R, and
// alpha is the expansion rate at each node.
struct Trajectory {
    double R = 0.0;
    double theta0 = 0.0;
    ClosedCurve curve;
    std::vector<double> t;
    std::vector<double> theta;
    std::vector<double> dtheta;
    std::vector<double> alpha;
    std::vector<Vec2> position;

    std::size_t size() const { return t.size(); }
};

// Integrate the chord angle over [a, b]. The initial condition is always
// anchored at t = 0 with theta(0) = theta0; if the span does not start there
// the solution is carried to the span first and recorded only inside it.
inline Trajectory integrate_rse(const ClosedCurve& curve, double R, double theta0,
                                std::pair<double, double> t_span,
                                const IntegrationConfig& cfg = {}) {
    detail::validate_R(R);
    if (!std::isfinite(theta0)) throw validation_error("theta0 must be finite");
    detail::validate_span(t_span);
    cfg.validate();
    const double a = t_span.first, b = t_span.second;
    const double B_max = detail::max_speed(curve);

    Trajectory traj;
    traj.R = R;
    traj.theta0 = theta0;
    traj.curve = curve;

    auto record = [&](double t, double th, double dth) {
        traj.t.push_back(t);
        traj.theta.push_back(th);
        traj.dtheta.push_back(dth);
    };

    if (a == b) {
        double th_a = detail::advance_theta(curve, R, theta0, 0.0, a, cfg, B_max);
        record(a, th_a, rse_rhs(curve, R, a, th_a));
    } else if (a >= 0.0) {
        double th_a = detail::advance_theta(curve, R, theta0, 0.0, a, cfg, B_max);
        detail::run_theta_leg(curve, R, th_a, a, b, cfg, B_max, record);
    } else if (b <= 0.0) {
        double th_b = detail::advance_theta(curve, R, theta0, 0.0, b, cfg, B_max);
        detail::run_theta_leg(curve, R, th_b, b, a, cfg, B_max, record);
        std::reverse(traj.t.begin(), traj.t.end());
        std::reverse(traj.theta.begin(), traj.theta.end());
        std::reverse(traj.dtheta.begin(), traj.dtheta.end());
    } else {
        detail::run_theta_leg(curve, R, theta0, 0.0, a, cfg, B_max, record);
        std::reverse(traj.t.begin(), traj.t.end());
        std::reverse(traj.theta.begin(), traj.theta.end());
        std::reverse(traj.dtheta.begin(), traj.dtheta.end());
        // forward leg repeats t = 0; skip that first node when appending
        bool first = true;
        detail::run_theta_leg(curve, R, theta0, 0.0, b, cfg, B_max,
                              [&](double t, double th, double dth) {
                                  if (first) { first = false; return; }
                                  record(t, th, dth);
                              });
    }

    traj.alpha.resize(traj.size());
    traj.position.resize(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        traj.alpha[i] = alpha(curve, R, traj.t[i], traj.theta[i]);
        traj.position[i] = curve.evaluate(traj.t[i]) + R * Vec2{std::cos(traj.theta[i]),
                                                                std::sin(traj.theta[i])};
    }
    for (std::size_t i = 1; i < traj.size(); ++i)
        if (std::abs(traj.theta[i] - traj.theta[i - 1]) >= std::numbers::pi)
            throw numerical_error("consecutive angle samples differ by pi or more; raise steps_per_period");
    return traj;
}

// One full turn of the period map: theta(2 pi) given theta(0) = theta0.
inline double poincare_map(const ClosedCurve& curve, double R, double theta0,
                           const IntegrationConfig& cfg = {}) {
    detail::validate_R(R);
    if (!std::isfinite(theta0)) throw validation_error("theta0 must be finite");
    cfg.validate();
    double B_max = detail::max_speed(curve);
    return detail::advance_theta(curve, R, theta0, 0.0, two_pi, cfg, B_max);
}

// Positions only, for the untransformed pursuit equation in the plane.
struct PathTrajectory {
    double initial_distance = 0.0;
    std::vector<double> t;
    std::vector<Vec2> position;

    std::size_t size() const { return t.size(); }
};

// Integrate the planar pursuit equation directly from r(a) = r_init. The
// chord length is a first integral; the integration aborts if the numerical
// path ever comes closer than half the initial distance to the base point,
// since the vector field blows up there.
inline PathTrajectory integrate_se_direct(const ClosedCurve& curve, Vec2 r_init,
                                          std::pair<double, double> t_span,
                                          const IntegrationConfig& cfg = {}) {
    detail::validate_span(t_span);
    cfg.validate();
    const double a = t_span.first, b = t_span.second;
    const double R0 = distance(r_init, curve.evaluate(a));
    if (!(R0 > 0.0))
        throw validation_error("initial point coincides with the base curve point; the field is singular there");

    auto rhs = [&](double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        Vec2 d = Vec2{y[0], y[1]} - curve.evaluate(t);
        double dist2 = norm2(d);
        if (dist2 < 0.25 * R0 * R0)
            throw numerical_error("path entered the forbidden disk of radius R/2 around the base point near t=" +
                                  std::to_string(t));
        double proj = dot(curve.derivative(t), d) / dist2;
        dy[0] = proj * d.x;
        dy[1] = proj * d.y;
    };

    PathTrajectory traj;
    traj.initial_distance = R0;
    auto obs = [&](double t, const std::array<double, 2>& y, const std::array<double, 2>&) {
        traj.t.push_back(t);
        traj.position.push_back({y[0], y[1]});
    };
    std::array<double, 2> y0{r_init.x, r_init.y};
    if (a == b) {
        traj.t.push_back(a);
        traj.position.push_back(r_init);
    } else if (cfg.method == Method::rk4_fixed) {
        long n = std::max<long>(1, static_cast<long>(std::ceil(
                                       (b - a) / two_pi * static_cast<double>(cfg.steps_per_period))));
        detail::integrate_fixed_rk4<2>(rhs, y0, a, b, n, obs);
    } else {
        detail::integrate_rk45<2>(rhs, y0, a, b, cfg, obs);
    }
    return traj;
}

// State of the linearized three-dimensional lift: a plane vector x and a
// scalar y with y^2 - |x|^2 conserved. The chord solution is recovered as
// r = r0 + R x / y while y stays positive.
struct EseState {
    Vec2 x;
    double y = 1.0;
};

struct EseTrajectory {
    double R = 0.0;
    double theta0 = 0.0;
    std::vector<double> t;
    std::vector<EseState> state;
    std::vector<Vec2> position;

    std::size_t size() const { return t.size(); }
};

// Integrate the linear lift with x(0) = (cos theta0, sin theta0), y(0) = 1.
// As with the angular form, the initial condition lives at t = 0 and the
// state is carried to the span before recording starts.
inline EseTrajectory integrate_ese(const ClosedCurve& curve, double R, double theta0,
                                   std::pair<double, double> t_span,
                                   const IntegrationConfig& cfg = {}) {
    detail::validate_R(R);
    if (!std::isfinite(theta0)) throw validation_error("theta0 must be finite");
    detail::validate_span(t_span);
    cfg.validate();

    auto rhs = [&](double t, const std::array<double, 3>& y, std::array<double, 3>& dy) {
        Vec2 v = curve.derivative(t);
        dy[0] = -(1.0 / R) * v.x * y[2];
        dy[1] = -(1.0 / R) * v.y * y[2];
        dy[2] = -(1.0 / R) * (v.x * y[0] + v.y * y[1]);
    };

    EseTrajectory traj;
    traj.R = R;
    traj.theta0 = theta0;
    auto check_y = [](double t, double yval) {
        if (!(yval > 0.0))
            throw numerical_error("lift denominator y reached zero near t=" + std::to_string(t) +
                                  "; the chord reconstruction has a pole");
    };
    auto record = [&](double t, const std::array<double, 3>& y, const std::array<double, 3>&) {
        check_y(t, y[2]);
        traj.t.push_back(t);
        traj.state.push_back({{y[0], y[1]}, y[2]});
        traj.position.push_back(curve.evaluate(t) + (traj.R / y[2]) * Vec2{y[0], y[1]});
    };

    auto run_leg = [&](std::array<double, 3> y_start, double t0, double t1, auto&& observer) {
        std::array<double, 3> y_end = y_start;
        auto obs = [&](double t, const std::array<double, 3>& y, const std::array<double, 3>& dy) {
            check_y(t, y[2]);
            y_end = y;
            observer(t, y, dy);
        };
        if (cfg.method == Method::rk4_fixed) {
            long n = std::max<long>(1,
                                    static_cast<long>(std::ceil(std::abs(t1 - t0) / two_pi *
                                                                static_cast<double>(cfg.steps_per_period))));
            detail::integrate_fixed_rk4<3>(rhs, y_start, t0, t1, n, obs);
        } else {
            detail::integrate_rk45<3>(rhs, y_start, t0, t1, cfg, obs);
        }
        return y_end;
    };
    auto discard = [](double, const std::array<double, 3>&, const std::array<double, 3>&) {};
    auto reverse_all = [&]() {
        std::reverse(traj.t.begin(), traj.t.end());
        std::reverse(traj.state.begin(), traj.state.end());
        std::reverse(traj.position.begin(), traj.position.end());
    };

    const std::array<double, 3> y0{std::cos(theta0), std::sin(theta0), 1.0};
    const double a = t_span.first, b = t_span.second;
    if (a == b) {
        auto ya = a == 0.0 ? y0 : run_leg(y0, 0.0, a, discard);
        std::array<double, 3> dummy{};
        record(a, ya, dummy);
    } else if (a >= 0.0) {
        auto ya = a == 0.0 ? y0 : run_leg(y0, 0.0, a, discard);
        run_leg(ya, a, b, record);
    } else if (b <= 0.0) {
        auto yb = b == 0.0 ? y0 : run_leg(y0, 0.0, b, discard);
        run_leg(yb, b, a, record);
        reverse_all();
    } else {
        run_leg(y0, 0.0, a, record);
        reverse_all();
        bool first = true;
        run_leg(y0, 0.0, b, [&](double t, const std::array<double, 3>& y,
                                const std::array<double, 3>& dy) {
            if (first) { first = false; return; }
            record(t, y, dy);
        });
    }
    return traj;
}

// Continuous lift of phi = theta - psi + pi/2 along the trajectory nodes,
// where psi is the lifted tangent angle of the base curve. Integer multiples
// of pi are exactly the singular chord alignments.
inline std::vector<double> phi_lift(const ClosedCurve& curve, const Trajectory& traj) {
    if (traj.size() == 0) throw validation_error("empty trajectory");
    const auto& cx = curve.x();
    const auto& tx = traj.curve.x();
    const auto& cy = curve.y();
    const auto& ty = traj.curve.y();
    bool same = cx.a0 == tx.a0 && cy.a0 == ty.a0 && cx.a == tx.a && cx.b == tx.b && cy.a == ty.a &&
                cy.b == ty.b;
    if (!same)
        throw validation_error("trajectory was integrated over a different base curve");
    auto sa = speed_and_angle(curve, traj.t);
    std::vector<double> phi(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i)
        phi[i] = traj.theta[i] - sa[i].angle + 0.5 * std::numbers::pi;
    return phi;
}

} // namespace shadowing

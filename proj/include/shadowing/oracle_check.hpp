#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "shadowing/circle_oracle.hpp"
#include "shadowing/curve.hpp"
#include "shadowing/dynamics.hpp"
#include "shadowing/errors.hpp"
#include "shadowing/rotation.hpp"

namespace shadowing {

struct CheckItem {
    std::string name;
    bool pass = false;
    double observed = 0.0; // worst deviation seen
    double bound = 0.0;    // what it had to stay under (or over, see detail)
    std::string detail;
};

struct Scorecard {
    int n_periods = 0;
    std::vector<CheckItem> items;
    bool all_pass() const {
        for (const CheckItem& it : items)
            if (!it.pass) return false;
        return true;
    }
};

// Largest deviation of the moving point's distance-to-base from its initial
// value. The direct integrator must conserve this; a corrupted vector field
// shows up here immediately.
inline double distance_drift(const ClosedCurve& curve, const PathTrajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        double d = distance(traj.position[i], curve.evaluate(traj.t[i]));
        worst = std::max(worst, std::abs(d - traj.initial_distance));
    }
    return worst;
}

// Cross-validation battery: every closed-form unit-circle result is checked
// against the numeric integrators. Returns a scorecard; callers decide how to
// surface failures.
inline Scorecard run_oracle_battery(int n_periods = 512,
                                    const IntegrationConfig& sweep_cfg = detail::scan_config()) {
    Scorecard card;
    card.n_periods = n_periods;
    const ClosedCurve circle = make_circle(1.0);
    const IntegrationConfig fine_cfg{}; // default 4096 steps/period

    { // 1. oracle vs integrator across all three regimes
        std::mt19937 gen(20260814u);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        double worst = 0.0;
        std::string where;
        for (int k = 0; k < 20; ++k) {
            double R;
            if (k % 3 == 0) R = 0.1 + 0.8 * u01(gen);       // small
            else if (k % 3 == 1) R = 1.0;                    // critical
            else R = 1.05 + 3.5 * u01(gen);                  // large
            double theta0 = -3.0 + 6.0 * u01(gen);
            Trajectory traj = integrate_rse(circle, R, theta0, {0.0, 10.0 * std::numbers::pi},
                                            fine_cfg);
            for (std::size_t i = 0; i < traj.size(); i += 16) {
                double ref = theta_oracle_circle(R, theta0, traj.t[i]);
                double dev = std::abs(traj.theta[i] - ref);
                if (dev > worst) {
                    worst = dev;
                    where = "R=" + std::to_string(R) + " theta0=" + std::to_string(theta0);
                }
            }
        }
        card.items.push_back({"oracle-vs-integrator", worst < 1e-6, worst, 1e-6,
                              "20 random (R,theta0), t in [0,10pi]; worst at " + where});
    }

    { // 2. rotation number law on a 50-point grid
        const double bound = 1.0 / n_periods + 1e-6;
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            double R = 0.1 + (5.0 - 0.1) * i / 49.0;
            RotationEstimate est = rotation_number(circle, R, n_periods, sweep_cfg);
            worst = std::max(worst, std::abs(est.value - rotation_number_circle(R)));
        }
        card.items.push_back({"rotation-law", worst < bound, worst, bound,
                              "50 R-grid points in [0.1,5], n=" + std::to_string(n_periods)});
    }

    { // 3. perturbed start collapses onto the attracting circular orbit
        const double R = 0.8;
        auto [theta_plus, theta_minus] = equilibria(R);
        (void)theta_minus;
        double t_end = 20.0 * std::numbers::pi;
        Trajectory pert =
            integrate_rse(circle, R, theta_plus + 0.1, {t_end, t_end}, fine_cfg);
        Trajectory eq = integrate_rse(circle, R, theta_plus, {t_end, t_end}, fine_cfg);
        double gap = distance(pert.position[0], eq.position[0]);
        card.items.push_back({"equilibrium-stability", gap < 1e-6, gap, 1e-6,
                              "R=4/5, theta0 = theta_plus + 0.1, separation at t=20pi"});
    }

    { // 4. minimal period 4pi at the (2,1) subharmonic distance
        const double R = subharmonic_distance(2, 1);
        Trajectory traj =
            integrate_rse(circle, R, 0.0, {0.0, 6.0 * std::numbers::pi}, fine_cfg);
        // nodes are affine over the span, so index offsets hit t+2pi, t+4pi exactly
        const std::size_t per = (traj.size() - 1) / 3; // samples per 2pi
        double worst_close = 0.0, min_far = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < per; i += per / 16) {
            worst_close =
                std::max(worst_close, distance(traj.position[i], traj.position[i + 2 * per]));
            min_far = std::min(min_far, distance(traj.position[i], traj.position[i + per]));
        }
        bool ok = worst_close < 1e-6 && min_far > 0.1;
        card.items.push_back({"minimal-period", ok, worst_close, 1e-6,
                              "R=2/sqrt(3): |r(t+4pi)-r(t)| (and |r(t+2pi)-r(t)| = " +
                                  std::to_string(min_far) + " must exceed 0.1)"});
    }

    { // 5. ergodic regime fills the annulus R-1 <= |r| <= R+1; sample densely
      //    enough that node spacing cannot eat into the 0.05 margin
        const double R = 1.5;
        Trajectory traj =
            integrate_rse(circle, R, 0.0, {0.0, 500.0 * std::numbers::pi}, fine_cfg);
        std::mt19937 gen(23u);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            double rin = R - 1.0, rout = R + 1.0;
            double rad = std::sqrt(rin * rin + (rout * rout - rin * rin) * u01(gen));
            double ang = two_pi * u01(gen);
            Vec2 target{rad * std::cos(ang), rad * std::sin(ang)};
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2& p : traj.position) best = std::min(best, norm2(p - target));
            worst = std::max(worst, std::sqrt(best));
        }
        card.items.push_back({"ergodic-density", worst < 0.05, worst, 0.05,
                              "R=3/2, t in [0,500pi], 200 random annulus targets"});
    }

    { // 6. direct integration conserves the shadowing distance
        double worst_rel = 0.0;
        const double configs[][2] = {{0.8, 0.3}, {1.5, 0.7}, {3.0, -1.1}};
        for (auto [R, theta0] : configs) {
            Vec2 r_init = circle.evaluate(0.0) + R * Vec2{std::cos(theta0), std::sin(theta0)};
            PathTrajectory traj =
                integrate_se_direct(circle, r_init, {0.0, 10.0 * two_pi}, fine_cfg);
            double drift = distance_drift(circle, traj) / std::max(1.0, R);
            worst_rel = std::max(worst_rel, drift);
        }
        card.items.push_back({"distance-invariance", worst_rel < 1e-7, worst_rel, 1e-7,
                              "direct SE runs, 10 periods, drift relative to max(1,R)"});
    }

    return card;
}

inline nlohmann::json scorecard_to_json(const Scorecard& card) {
    nlohmann::json items = nlohmann::json::array();
    for (const CheckItem& it : card.items)
        items.push_back({{"name", it.name},
                         {"pass", it.pass},
                         {"observed", it.observed},
                         {"bound", it.bound},
                         {"detail", it.detail}});
    return nlohmann::json{
        {"n_periods", card.n_periods}, {"all_pass", card.all_pass()}, {"items", items}};
}

} // namespace shadowing

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shadowing/curve.hpp"
#include "shadowing/dynamics.hpp"
#include "shadowing/errors.hpp"
#include "shadowing/integrate.hpp"

namespace shadowing {

struct RotationEstimate {
    double value = 0.0;
    double error_bound = 0.0; // 1 / periods_used
    int periods_used = 0;
};

// Average advance of theta per period over n_periods periods, divided by 2 pi.
// The 1/n error bound is the standard orbit-deviation bound for lifts of
// circle homeomorphisms.
inline RotationEstimate rotation_number(const ClosedCurve& curve, double R, int n_periods,
                                        const IntegrationConfig& cfg = {}, double theta0 = 0.0) {
    detail::validate_R(R);
    if (n_periods < 16) throw validation_error("rotation_number needs at least 16 periods");
    if (!std::isfinite(theta0)) throw validation_error("theta0 must be finite");
    cfg.validate();
    const double B_max = detail::max_speed(curve);
    const double T = two_pi * static_cast<double>(n_periods);
    double th_end = detail::advance_theta(curve, R, theta0, 0.0, T, cfg, B_max);
    RotationEstimate est;
    est.value = (th_end - theta0) / T;
    est.periods_used = n_periods;
    est.error_bound = 1.0 / static_cast<double>(n_periods);
    return est;
}

struct SweepPoint {
    double R = 0.0;
    bool ok = false;
    RotationEstimate estimate;
    std::string error; // empty when ok
};

// One rotation estimate per grid value; failures are recorded per point and
// do not abort the sweep.
inline std::vector<SweepPoint> rotation_sweep(const ClosedCurve& curve,
                                              const std::vector<double>& R_grid,
                                              const IntegrationConfig& cfg = {},
                                              int n_periods = 512) {
    if (R_grid.empty()) throw validation_error("empty R grid");
    for (std::size_t i = 0; i < R_grid.size(); ++i) {
        if (!(R_grid[i] > 0.0)) throw validation_error("R grid values must be positive");
        if (i > 0 && !(R_grid[i] > R_grid[i - 1]))
            throw validation_error("R grid must be strictly increasing");
    }
    std::vector<SweepPoint> out;
    out.reserve(R_grid.size());
    for (double R : R_grid) {
        SweepPoint p;
        p.R = R;
        try {
            p.estimate = rotation_number(curve, R, n_periods, cfg);
            p.ok = true;
        } catch (const std::exception& e) {
            p.ok = false;
            p.error = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct UpperBoundReport {
    double R = 0.0;
    double value = 0.0;
    double bound = 0.0; // perimeter / (2 pi R)
    double slack = 0.0; // bound + error_bound - |value|
    bool pass = false;
};

// |rho(R)| can never exceed perimeter/(2 pi R); checks the estimate against
// that bound with its own error allowance.
inline UpperBoundReport check_upper_bound(const ClosedCurve& curve, const RotationEstimate& est,
                                          double R) {
    detail::validate_R(R);
    UpperBoundReport rep;
    rep.R = R;
    rep.value = est.value;
    rep.bound = perimeter(curve) / (two_pi * R);
    rep.slack = rep.bound + est.error_bound - std::abs(est.value);
    rep.pass = rep.slack >= 0.0;
    return rep;
}

namespace detail {

inline IntegrationConfig scan_config() {
    IntegrationConfig cfg;
    cfg.steps_per_period = 1024;
    return cfg;
}

inline IntegrationConfig far_field_config() {
    IntegrationConfig cfg;
    cfg.steps_per_period = 256;
    return cfg;
}

} // namespace detail

// rho(R) * 2 pi R^2 / A0 for each listed R; tends to 1 as R grows. Requires
// a nonzero enclosed area and distances that dwarf the curve.
inline std::vector<double> asymptotic_area_ratio(const ClosedCurve& curve,
                                                 const std::vector<double>& R_list,
                                                 const IntegrationConfig& cfg = detail::far_field_config(),
                                                 int n_periods = 2048) {
    if (R_list.empty()) throw validation_error("empty R list");
    const double A0 = enclosed_area(curve);
    if (std::abs(A0) <= 1e-9)
        throw hypothesis_error("enclosed area is zero; the asymptotic area law does not apply");
    auto ext = radius_of_curvature_extrema(curve);
    double scale = ext.max_radius;
    if (!ext.bounded) {
        scale = 0.0;
        for (int i = 0; i < 2048; ++i) scale = std::max(scale, norm(curve.evaluate(two_pi * i / 2048)));
    }
    for (double R : R_list)
        if (!(R >= 10.0 * scale))
            throw validation_error("asymptotic ratio requested at R=" + std::to_string(R) +
                                   ", below ten times the curve scale " + std::to_string(scale));
    std::vector<double> out;
    out.reserve(R_list.size());
    for (double R : R_list) {
        RotationEstimate est = rotation_number(curve, R, n_periods, cfg);
        out.push_back(est.value * two_pi * R * R / A0);
    }
    return out;
}

// Largest radius with a guarantee that rho(R) still equals the rotation
// index: the minimum radius of curvature.
inline double guaranteed_plateau_radius(const ClosedCurve& curve) {
    auto ext = radius_of_curvature_extrema(curve);
    if (!ext.bounded)
        throw hypothesis_error("curvature vanishes somewhere; no guaranteed plateau radius exists");
    return ext.min_radius;
}

struct DistanceReport {
    enum class Kind { critical, turning, target_rotation };
    Kind kind = Kind::critical;
    double estimate = 0.0;
    double bracket_low = 0.0;
    double bracket_high = 0.0;
    double rho_at_estimate = 0.0;
    std::vector<std::pair<double, double>> diagnostics; // (R, rho) pairs actually evaluated
    bool heuristic = false;
    std::string note;
};

namespace detail {

// Memoizing rho evaluator shared by the distance searches.
class RhoCache {
public:
    RhoCache(const ClosedCurve& curve, const IntegrationConfig& cfg, int n_periods)
        : curve_(curve), cfg_(cfg), n_(n_periods) {}

    double operator()(double R) {
        auto it = memo_.find(R);
        if (it != memo_.end()) return it->second;
        double v = rotation_number(curve_, R, n_, cfg_).value;
        memo_.emplace(R, v);
        return v;
    }

    double error_bound() const { return 1.0 / static_cast<double>(n_); }

    std::vector<std::pair<double, double>> sorted_evaluations() const {
        return {memo_.begin(), memo_.end()};
    }

private:
    const ClosedCurve& curve_;
    IntegrationConfig cfg_;
    int n_;
    std::map<double, double> memo_;
};

} // namespace detail

// Upper edge of the rho = omega0 plateau: geometric scan upward from the
// guaranteed plateau radius until the estimate departs by more than three
// error bounds, then bisection down to the requested width. The reported
// estimate is the confirmed-departed upper end of the bracket.
inline DistanceReport critical_distance(const ClosedCurve& curve, double tol,
                                        const IntegrationConfig& cfg = detail::scan_config(),
                                        int n_periods = 512) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw validation_error("tolerance must be positive");
    const int omega0 = rotation_index(curve);
    if (omega0 == 0)
        throw hypothesis_error("rotation index is zero; the rho plateau is undefined");
    const double mu = perimeter(curve) / two_pi;
    const double start = guaranteed_plateau_radius(curve);
    detail::RhoCache rho(curve, cfg, n_periods);
    const double eps = 3.0 * rho.error_bound();

    double lo = start, hi = 0.0;
    if (std::abs(rho(start) - omega0) > eps)
        throw numerical_error("rotation number departs from the index already at the plateau radius " +
                              std::to_string(start));
    for (double R = start * 1.05;; R *= 1.05) {
        if (R > 10.0 * mu)
            throw numerical_error("no plateau departure found below ten mean radii; scan range suspect");
        if (std::abs(rho(R) - omega0) > eps) {
            hi = R;
            break;
        }
        lo = R;
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (std::abs(rho(mid) - omega0) > eps) hi = mid;
        else lo = mid;
    }

    DistanceReport rep;
    rep.kind = DistanceReport::Kind::critical;
    rep.estimate = hi;
    rep.bracket_low = lo;
    rep.bracket_high = hi;
    rep.rho_at_estimate = rho(hi);
    rep.diagnostics = rho.sorted_evaluations();
    const double ceiling = mu / std::abs(static_cast<double>(omega0));
    if (rep.estimate > ceiling + tol)
        throw numerical_error("critical distance estimate " + std::to_string(rep.estimate) +
                              " exceeds the theoretical ceiling " + std::to_string(ceiling));
    return rep;
}

// Onset of the strictly monotone non-plateau tail of rho(R). Finitely
// checkable only on a grid, so the result is flagged heuristic: the tail is
// verified on a geometric grid up to twenty mean radii.
inline DistanceReport turning_distance(const ClosedCurve& curve, double tol,
                                       const IntegrationConfig& cfg = detail::scan_config(),
                                       int n_periods = 512) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw validation_error("tolerance must be positive");
    const int omega0 = rotation_index(curve);
    const double A0 = enclosed_area(curve);
    if (omega0 == 0 || std::abs(A0) <= 1e-9)
        throw hypothesis_error("turning distance needs nonzero rotation index and enclosed area");

    DistanceReport crit = critical_distance(curve, tol, cfg, n_periods);
    const double mu = perimeter(curve) / two_pi;
    detail::RhoCache rho(curve, cfg, n_periods);
    const double eb = rho.error_bound();
    const double dir = A0 > 0.0 ? 1.0 : -1.0; // tail decreases toward 0 for ccw curves

    // Geometric grid: fine near the critical estimate, coarser out to 20 mu.
    const double anchor = crit.bracket_high;
    std::vector<double> grid;
    double fine_ratio = std::min(1.005, 1.0 + 0.5 * tol / std::max(anchor, 1e-9));
    for (double R = anchor; R <= anchor * 1.10; R *= fine_ratio) grid.push_back(R);
    for (double R = grid.back() * 1.05; R <= 20.0 * mu; R *= 1.05) grid.push_back(R);

    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = rho(grid[i]);

    // tail_ok(i): beyond grid[i] the curve rho(R) stays off the plateau value
    // and is monotone within the estimator resolution.
    auto tail_ok = [&](std::size_t i) {
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            if (std::abs(vals[j] - omega0) <= 2.0 * eb) return false;
            if (j + 1 < grid.size() && dir * (vals[j + 1] - vals[j]) > 2.0 * eb) return false;
        }
        return true;
    };
    std::size_t first = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (tail_ok(i)) {
            first = i;
            break;
        }
    }
    if (first == grid.size())
        throw numerical_error("no monotone tail onset found below twenty mean radii");

    // Refine between the previous grid point (or the critical bracket) and
    // the first qualifying grid point.
    double hi = grid[first];
    double lo = first > 0 ? grid[first - 1] : crit.bracket_low;
    double rho_next = vals[first];
    auto qualifies = [&](double x) {
        double v = rho(x);
        if (std::abs(v - omega0) <= 2.0 * eb) return false;
        return dir * (rho_next - v) <= 2.0 * eb; // consistent with the tail beyond
    };
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (qualifies(mid)) hi = mid;
        else lo = mid;
    }

    DistanceReport rep;
    rep.kind = DistanceReport::Kind::turning;
    rep.estimate = hi;
    rep.bracket_low = lo;
    rep.bracket_high = hi;
    rep.rho_at_estimate = rho(hi);
    rep.heuristic = true;
    rep.note = "monotone tail verified on a finite geometric grid up to 20 mean radii";
    rep.diagnostics = rho.sorted_evaluations();
    return rep;
}

// Distance at which rho(R) passes through the requested target value,
// bisecting on the predicate rho(R) >= target so that rational plateaus
// cannot trap the search. Returns a bracket, not a uniqueness claim.
inline DistanceReport find_distance_for_rotation(const ClosedCurve& curve, double target,
                                                 std::optional<std::pair<double, double>> bracket,
                                                 double tol,
                                                 const IntegrationConfig& cfg = detail::scan_config(),
                                                 int n_periods = 512) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw validation_error("tolerance must be positive");
    const int omega0 = rotation_index(curve);
    if (omega0 < 1)
        throw hypothesis_error("target-rotation search assumes a positively oriented curve");
    if (!(target > 0.0 && target < static_cast<double>(omega0)))
        throw validation_error("target rotation number must lie strictly between 0 and the index");
    detail::RhoCache rho(curve, cfg, n_periods);
    const double mu = perimeter(curve) / two_pi;

    double lo, hi;
    if (bracket) {
        lo = bracket->first;
        hi = bracket->second;
        if (!(lo > 0.0 && hi > lo)) throw validation_error("bracket must satisfy 0 < low < high");
        if (!(rho(lo) > target && target > rho(hi)))
            throw validation_error("bracket does not straddle the target rotation number");
    } else {
        lo = guaranteed_plateau_radius(curve);
        if (!(rho(lo) > target))
            throw numerical_error("rho at the plateau radius does not exceed the target");
        hi = lo;
        do {
            hi *= 1.5;
            if (hi > 50.0 * mu)
                throw numerical_error("auto-bracketing failed below fifty mean radii");
        } while (!(rho(hi) < target));
    }

    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (rho(mid) >= target) lo = mid;
        else hi = mid;
    }

    DistanceReport rep;
    rep.kind = DistanceReport::Kind::target_rotation;
    rep.estimate = 0.5 * (lo + hi);
    rep.bracket_low = lo;
    rep.bracket_high = hi;
    rep.rho_at_estimate = rho(rep.estimate);
    rep.diagnostics = rho.sorted_evaluations();
    return rep;
}

} // namespace shadowing

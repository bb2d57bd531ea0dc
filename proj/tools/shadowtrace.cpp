#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shadowing/circle_oracle.hpp"
#include "shadowing/csv.hpp"
#include "shadowing/curve.hpp"
#include "shadowing/dynamics.hpp"
#include "shadowing/errors.hpp"
#include "shadowing/json_io.hpp"
#include "shadowing/oracle_check.hpp"
#include "shadowing/rotation.hpp"
#include "shadowing/singularities.hpp"
#include "shadowing/svg.hpp"

namespace {

using namespace shadowing;

struct SpanOpt {
    double a = 0.0;
    double b = 10.0 * two_pi;
};

SpanOpt parse_span(const std::string& text) {
    SpanOpt s;
    char extra;
    if (std::sscanf(text.c_str(), "%lf:%lf %c", &s.a, &s.b, &extra) != 2)
        throw validation_error("--t-span must look like a:b (got \"" + text + "\")");
    return s;
}

int thread_budget(std::size_t n_jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw ? static_cast<int>(hw) : 4;
    if (const char* env = std::getenv("SHADOWTRACE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw validation_error("SHADOWTRACE_THREADS must be a positive integer");
        n = static_cast<int>(std::min<long>(v, 256));
    }
    return std::max(1, std::min<int>(n, static_cast<int>(std::max<std::size_t>(n_jobs, 1))));
}

std::vector<Vec2> curve_polyline(const ClosedCurve& curve) {
    std::vector<Vec2> pts;
    const int n = 1024;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) pts.push_back(curve.evaluate(two_pi * i / n));
    return pts;
}

std::vector<Vec2> downsample(const std::vector<Vec2>& pts, std::size_t cap) {
    if (pts.size() <= cap) return pts;
    std::vector<Vec2> out;
    std::size_t stride = (pts.size() + cap - 1) / cap;
    for (std::size_t i = 0; i < pts.size(); i += stride) out.push_back(pts[i]);
    if (out.back().x != pts.back().x || out.back().y != pts.back().y) out.push_back(pts.back());
    return out;
}

std::string trace_svg(const ClosedCurve& curve, const Trajectory& traj,
                      const std::vector<CuspEvent>& cusps, const std::string& title) {
    SvgPlot fig(720, 720, /*equal_aspect=*/true);
    fig.set_title(title);
    fig.add_polyline(curve_polyline(curve), "#1f77b4", 2.0);
    fig.add_polyline(downsample(traj.position, 16384), "#d62728", 1.2);
    if (!traj.position.empty())
        fig.add_marker(traj.position.front(), 4.5, "black", "none"); // the initial point
    for (const CuspEvent& e : cusps) fig.add_marker(e.location, 2.5, "black", "black");
    return fig.render();
}

nlohmann::json span_json(const SpanOpt& s) { return nlohmann::json::array({s.a, s.b}); }

int cmd_trace(const std::string& curve_arg, double R, double theta0, const std::string& span_text,
              int spp, const std::string& out) {
    auto [curve, spec] = load_curve_spec(curve_arg);
    SpanOpt span = parse_span(span_text);
    IntegrationConfig cfg;
    cfg.steps_per_period = spp;
    Trajectory traj = integrate_rse(curve, R, theta0, {span.a, span.b}, cfg);
    std::vector<CuspEvent> cusps = detect_singular_times(curve, traj);

    const std::string csv_path = out + ".csv", svg_path = out + ".svg";
    write_text_file(csv_path, trajectory_csv(traj));
    char title[128];
    std::snprintf(title, sizeof title, "shadowing trace, R=%g, theta0=%g", R, theta0);
    write_text_file(svg_path, trace_svg(curve, traj, cusps, title));

    RunManifest man;
    man.command = "trace";
    man.curve_spec = spec;
    man.parameters = {{"R", R},
                      {"theta0", theta0},
                      {"t_span", span_json(span)},
                      {"steps_per_period", spp}};
    man.outputs = {csv_path, svg_path};
    write_text_file(out + ".manifest.json", manifest_to_json(man).dump(2) + "\n");

    nlohmann::json summary{{"samples", traj.size()},
                           {"cusps", cusp_events_to_json(cusps)},
                           {"outputs", man.outputs}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& curve_arg, double R_min, double R_max, int n_points,
              int n_periods, int spp, const std::string& out) {
    auto [curve, spec] = load_curve_spec(curve_arg);
    if (!(R_min > 0.0) || !std::isfinite(R_min) || !std::isfinite(R_max))
        throw validation_error("sweep needs 0 < R-min and finite bounds");
    if (n_points < 1) throw validation_error("sweep needs at least one point");
    if (n_points > 1 && !(R_max > R_min))
        throw validation_error("sweep needs R-min < R-max for more than one point");
    IntegrationConfig cfg;
    cfg.steps_per_period = spp;

    std::vector<double> grid(n_points);
    for (int i = 0; i < n_points; ++i)
        grid[i] = n_points == 1 ? R_min : R_min + (R_max - R_min) * i / (n_points - 1.0);

    std::vector<SweepPoint> pts(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            pts[i].R = grid[i];
            try {
                pts[i].estimate = rotation_number(curve, grid[i], n_periods, cfg);
                pts[i].ok = true;
            } catch (const std::exception& e) {
                pts[i].ok = false;
                pts[i].error = e.what();
            }
        }
    };
    int n_threads = thread_budget(grid.size());
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();

    const std::string csv_path = out + ".csv", svg_path = out + ".svg";
    write_text_file(csv_path, sweep_csv(pts, n_periods));

    SvgPlot fig(800, 520);
    fig.set_title("rotation number vs shadowing distance");
    fig.enable_axes("R", "rho");
    std::vector<Vec2> seg;
    for (const SweepPoint& p : pts) {
        if (p.ok) {
            seg.push_back({p.R, p.estimate.value});
        } else if (seg.size() >= 2) {
            fig.add_polyline(seg, "#1f77b4", 2.0);
            seg.clear();
        } else {
            seg.clear();
        }
    }
    if (seg.size() >= 2) fig.add_polyline(seg, "#1f77b4", 2.0);
    if (pts.size() == 1 && pts[0].ok) fig.add_marker({pts[0].R, pts[0].estimate.value}, 3.0, "#1f77b4", "#1f77b4");
    write_text_file(svg_path, fig.render());

    RunManifest man;
    man.command = "sweep";
    man.curve_spec = spec;
    man.parameters = {{"R_min", R_min},
                      {"R_max", R_max},
                      {"n_points", n_points},
                      {"n_periods", n_periods},
                      {"steps_per_period", spp}};
    man.outputs = {csv_path, svg_path};
    write_text_file(out + ".manifest.json", manifest_to_json(man).dump(2) + "\n");

    int failed = 0;
    for (const SweepPoint& p : pts) failed += p.ok ? 0 : 1;
    std::cout << "sweep: " << pts.size() << " points, " << failed << " failed\n";
    return 0;
}

int cmd_critical(const std::string& curve_arg, double tol, int n_periods, int spp,
                 const std::string& out) {
    auto [curve, spec] = load_curve_spec(curve_arg);
    IntegrationConfig cfg;
    cfg.steps_per_period = spp;
    DistanceReport rep = critical_distance(curve, tol, cfg, n_periods);
    nlohmann::json j = distance_report_to_json(rep);
    std::cout << j.dump(2) << "\n";
    if (!out.empty()) {
        write_text_file(out, j.dump(2) + "\n");
        RunManifest man;
        man.command = "critical";
        man.curve_spec = spec;
        man.parameters = {{"tol", tol}, {"n_periods", n_periods}, {"steps_per_period", spp}};
        man.outputs = {out};
        write_text_file(out + ".manifest.json", manifest_to_json(man).dump(2) + "\n");
    }
    return 0;
}

// Finds the distance R at which the rotation number locks to omega0 - q/p,
// then bisects the per-minimal-period angular advance to polish R and traces
// one minimal period to verify the orbit actually closes.
int cmd_subharmonic(const std::string& curve_arg, int p, int q, double theta0, int n_periods,
                    int spp, const std::string& out) {
    auto [curve, spec] = load_curve_spec(curve_arg);
    if (p <= q || q < 1) throw validation_error("need coprime integers p > q >= 1");
    if (std::gcd(p, q) != 1) throw validation_error("p and q must be coprime");
    int omega0 = rotation_index(curve);
    double target = omega0 - static_cast<double>(q) / p;
    if (!(target > 0.0) || !(target < omega0))
        throw validation_error("q/p must be smaller than the curve's rotation index");

    IntegrationConfig cfg;
    cfg.steps_per_period = spp;
    DistanceReport rep =
        find_distance_for_rotation(curve, target, std::nullopt, 1e-4, cfg, n_periods);

    const int settle = 64;
    const double B_max = detail::max_speed(curve);
    const double expected_advance = 2.0 * std::numbers::pi * (p - q) * (omega0 > 0 ? 1 : -1);
    auto advance_error = [&](double R) {
        double t_mid = settle * two_pi, t_end = (settle + p) * two_pi;
        double th_mid = detail::advance_theta(curve, R, theta0, 0.0, t_mid, cfg, B_max);
        double th_end = detail::advance_theta(curve, R, th_mid, t_mid, t_end, cfg, B_max);
        return th_end - th_mid - expected_advance;
    };

    double R_est = rep.estimate;
    double h_est = advance_error(R_est);
    double R_final = R_est;
    if (std::abs(h_est) <= 1e-10) {
        // inside a locking window the advance is already exact
    } else {
        // the rotation-number bracket is only accurate to its 1/n error bound,
        // so the true root may sit just outside it; widen until h changes sign
        double lo = rep.bracket_low, hi = rep.bracket_high;
        double h_lo = advance_error(lo), h_hi = advance_error(hi);
        double w = std::max(hi - lo, 1e-6 * R_est);
        for (int grow = 0; h_lo * h_hi > 0.0 && grow < 40; ++grow) {
            w *= 2.0;
            lo = std::max(R_est - w, 0.5 * R_est);
            hi = std::min(R_est + w, 2.0 * R_est);
            h_lo = advance_error(lo);
            h_hi = advance_error(hi);
        }
        if (h_lo * h_hi > 0.0)
            throw numerical_error("advance mismatch does not change sign near the estimate");
        for (int it = 0; it < 64 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
            double mid = 0.5 * (lo + hi);
            double hm = advance_error(mid);
            if (hm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((hm > 0.0) == (h_lo > 0.0)) {
                lo = mid;
                h_lo = hm;
            } else {
                hi = mid;
                h_hi = hm;
            }
        }
        R_final = 0.5 * (lo + hi);
    }

    // trace one minimal period from the settled phase
    double th_settled =
        detail::advance_theta(curve, R_final, theta0, 0.0, settle * two_pi, cfg, B_max);
    Trajectory orbit = integrate_rse(curve, R_final, std::remainder(th_settled, two_pi),
                                     {0.0, 2.0 * std::numbers::pi * p}, cfg);
    double closure = distance(orbit.position.back(), orbit.position.front());
    if (!(closure < 0.05))
        throw numerical_error("traced orbit failed to close: gap " + std::to_string(closure));
    std::vector<CuspEvent> cusps = detect_singular_times(curve, orbit);

    // closure counts as sensitive when the locking window (if any) is narrower
    // than a 1e-4 relative nudge in R
    double window_gap = std::max(std::abs(advance_error(R_final * (1.0 - 1e-4))),
                                 std::abs(advance_error(R_final * (1.0 + 1e-4))));
    bool sensitive = window_gap > 1e-6 || closure > 1e-5;

    const std::string csv_path = out + ".csv", svg_path = out + ".svg";
    write_text_file(csv_path, trajectory_csv(orbit));
    char title[128];
    std::snprintf(title, sizeof title, "subharmonic (%d,%d) closed orbit, R=%.6f", p, q, R_final);
    write_text_file(svg_path, trace_svg(curve, orbit, cusps, title));

    nlohmann::json j{{"p", p},
                     {"q", q},
                     {"target_rho", target},
                     {"R", R_final},
                     {"closure", closure},
                     {"minimal_period", 2.0 * std::numbers::pi * p},
                     {"n_cusps", cusps.size()},
                     {"sensitivity_warning", sensitive},
                     {"search", distance_report_to_json(rep)}};
    if (sensitive)
        j["warning"] = "closure is sensitive in the shadowing distance; treat R as approximate";
    std::cout << j.dump(2) << "\n";
    write_text_file(out + ".json", j.dump(2) + "\n");

    RunManifest man;
    man.command = "subharmonic";
    man.curve_spec = spec;
    man.parameters = {{"p", p},
                      {"q", q},
                      {"theta0", theta0},
                      {"n_periods", n_periods},
                      {"steps_per_period", spp}};
    man.outputs = {csv_path, svg_path, out + ".json"};
    write_text_file(out + ".manifest.json", manifest_to_json(man).dump(2) + "\n");
    return 0;
}

int cmd_oracle_check(int n_periods, const std::string& out) {
    Scorecard card = run_oracle_battery(n_periods);
    nlohmann::json j = scorecard_to_json(card);
    std::cout << j.dump(2) << "\n";
    if (!out.empty()) write_text_file(out, j.dump(2) + "\n");
    if (!card.all_pass()) throw numerical_error("oracle cross-validation battery has failures");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shadowing-curve tracer: integrates the shadowing equations around a closed "
                 "convex curve and reports rotation numbers, critical distances, and cusps"};
    app.require_subcommand(1);

    std::string curve_arg, span_text = "0:62.831853071795865", out;
    double R = 1.0, theta0 = 0.0, tol = 0.01, R_min = 0.5, R_max = 5.0;
    // steps-per-period 0 means "per-command default": 4096 for trace, 1024 for
    // the rotation-number scans
    int spp = 0, n_periods = 512, n_points = 100, p = 2, q = 1;

    CLI::App* trace = app.add_subcommand("trace", "integrate one trajectory; CSV + SVG");
    trace->add_option("--curve", curve_arg, "curve spec file or inline JSON")->required();
    trace->add_option("--R", R, "shadowing distance")->required();
    trace->add_option("--theta0", theta0, "initial chord angle (radians)");
    trace->add_option("--t-span", span_text, "time span a:b");
    trace->add_option("--steps-per-period", spp, "fixed RK4 steps per 2pi");
    trace->add_option("--out", out, "output path prefix")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "rotation number over an R grid; CSV + SVG");
    sweep->add_option("--curve", curve_arg, "curve spec file or inline JSON")->required();
    sweep->add_option("--R-min", R_min, "smallest distance")->required();
    sweep->add_option("--R-max", R_max, "largest distance")->required();
    sweep->add_option("--n-points", n_points, "grid size");
    sweep->add_option("--n-periods", n_periods, "periods per estimate");
    sweep->add_option("--steps-per-period", spp, "fixed RK4 steps per 2pi");
    sweep->add_option("--out", out, "output path prefix")->required();

    CLI::App* critical = app.add_subcommand("critical", "locate the critical shadowing distance");
    critical->add_option("--curve", curve_arg, "curve spec file or inline JSON")->required();
    critical->add_option("--tol", tol, "bracket width tolerance");
    critical->add_option("--n-periods", n_periods, "periods per rotation estimate");
    critical->add_option("--steps-per-period", spp, "fixed RK4 steps per 2pi");
    critical->add_option("--out", out, "write the JSON report here");

    CLI::App* sub = app.add_subcommand("subharmonic", "find R with rho = omega0 - q/p and trace "
                                                      "the closed orbit");
    sub->add_option("--curve", curve_arg, "curve spec file or inline JSON")->required();
    sub->add_option("--p", p, "denominator")->required();
    sub->add_option("--q", q, "numerator")->required();
    sub->add_option("--theta0", theta0, "initial chord angle (radians)");
    sub->add_option("--n-periods", n_periods, "periods per rotation estimate");
    sub->add_option("--steps-per-period", spp, "fixed RK4 steps per 2pi");
    sub->add_option("--out", out, "output path prefix")->required();

    CLI::App* oc = app.add_subcommand("oracle-check", "run the closed-form cross-validation "
                                                      "battery");
    oc->add_option("--n-periods", n_periods, "periods for the rotation-law item");
    oc->add_option("--out", out, "write the JSON scorecard here");

    try {
        app.parse(argc, argv);
        if (spp == 0) spp = trace->parsed() ? 4096 : 1024;
        if (trace->parsed())
            return cmd_trace(curve_arg, R, theta0, span_text, spp, out);
        if (sweep->parsed())
            return cmd_sweep(curve_arg, R_min, R_max, n_points, n_periods, spp, out);
        if (critical->parsed()) return cmd_critical(curve_arg, tol, n_periods, spp, out);
        if (sub->parsed()) return cmd_subharmonic(curve_arg, p, q, theta0, n_periods, spp, out);
        if (oc->parsed()) return cmd_oracle_check(n_periods, out);
        return 2;
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const shadowing::validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const shadowing::hypothesis_error& e) {
        std::cerr << "hypothesis not met: " << e.what() << "\n";
        return 4;
    } catch (const shadowing::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

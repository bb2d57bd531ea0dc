#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "shadowing/circle_oracle.hpp"
#include "shadowing/errors.hpp"
#include "shadowing/singularities.hpp"

using namespace shadowing;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);

ClosedCurve figure_eight() {
    FourierCoeffs x, y;
    x.a = {1.0};
    y.b = {0.0, 1.0};
    return make_fourier(x, y);
}

} // namespace

TEST_CASE("alignment events on the circle match the closed-form schedule") {
    ClosedCurve c = make_circle(1.0);
    Trajectory traj = integrate_rse(c, sqrt2, 0.0, {0.0, 6.0 * pi});
    auto events = detect_singular_times(c, traj);

    auto expected = turning_data_large_R(sqrt2, 0.0, 0, 4); // spacing pi sqrt(2)
    REQUIRE(events.size() == expected.size());
    for (std::size_t k = 0; k < events.size(); ++k) {
        CHECK(events[k].time == Approx(expected[k].time).margin(1e-6));
        CHECK(distance(events[k].location, expected[k].location) < 1e-6);
        CHECK((events[k].branch == CuspEvent::Branch::outer) == expected[k].outer);
        CHECK(events[k].phi_level == expected[k].phi_level);
        // |r''| = B |(B/R) cos(phi) + kappa B| with B = kappa = 1 here
        double want = events[k].branch == CuspEvent::Branch::outer ? 1.0 + 1.0 / sqrt2
                                                                   : 1.0 - 1.0 / sqrt2;
        CHECK(events[k].second_derivative_norm == Approx(want).margin(1e-6));
    }
    // consecutive events alternate between the two parallel circles
    for (std::size_t k = 1; k < events.size(); ++k) {
        CHECK(events[k].branch != events[k - 1].branch);
        CHECK(events[k].time - events[k - 1].time == Approx(pi * sqrt2).margin(1e-6));
    }
}

TEST_CASE("alignment events at and below the critical chord length") {
    ClosedCurve c = make_circle(1.0);

    // R = 1, theta0 = pi/2: the single alignment happens at t = 1
    Trajectory at_one = integrate_rse(c, 1.0, pi / 2, {0.0, 4.0 * pi});
    auto ev1 = detect_singular_times(c, at_one);
    REQUIRE(ev1.size() == 1);
    CHECK(ev1[0].time == Approx(turning_time_R1(pi / 2)).margin(1e-6));
    CHECK(ev1[0].branch == CuspEvent::Branch::outer);
    CHECK(norm(ev1[0].location) == Approx(2.0).margin(1e-6));
    CHECK(ev1[0].second_derivative_norm == Approx(2.0).margin(1e-6));

    // R = 4/5, theta0 = pi/4: one alignment at the closed-form time, then the
    // chord settles at the attracting angle and never aligns again
    Trajectory sub = integrate_rse(c, 0.8, pi / 4, {0.0, 10.0 * pi});
    auto ev2 = detect_singular_times(c, sub);
    REQUIRE(ev2.size() == 1);
    CHECK(ev2[0].time == Approx(0.37055664589034092).margin(1e-6));
    CHECK(ev2[0].time == Approx(turning_time_small_R(0.8, pi / 4)).margin(1e-6));
    CHECK(ev2[0].branch == CuspEvent::Branch::outer);
    CHECK(norm(ev2[0].location) == Approx(1.8).margin(1e-6));
}

TEST_CASE("detector input validation and degenerate configurations") {
    ClosedCurve c = make_circle(1.0);
    Trajectory empty;
    CHECK_THROWS_AS(detect_singular_times(c, empty), validation_error);

    Trajectory no_alpha = integrate_rse(c, sqrt2, 0.0, {0.0, two_pi});
    no_alpha.alpha.clear();
    CHECK_THROWS_AS(detect_singular_times(c, no_alpha), validation_error);

    Trajectory wrong_curve = integrate_rse(c, sqrt2, 0.0, {0.0, two_pi});
    CHECK_THROWS_AS(detect_singular_times(make_ellipse(2.0), wrong_curve), validation_error);

    // theta0 = pi at R = 1 is the rest solution: phi stays at pi identically,
    // so the alignment set is a whole interval and no discrete answer exists
    Trajectory pinned = integrate_rse(c, 1.0, pi, {0.0, two_pi});
    CHECK_THROWS_AS(detect_singular_times(c, pinned), numerical_error);
}

TEST_CASE("classification validates events against an independent difference") {
    ClosedCurve c = make_circle(1.0);
    Trajectory traj = integrate_rse(c, sqrt2, 0.0, {0.0, 6.0 * pi});
    auto events = detect_singular_times(c, traj);
    REQUIRE(events.size() >= 2);

    CHECK(classify_cusp(c, sqrt2, events[0]) == CuspClass::ordinary);
    CHECK(classify_cusp(c, sqrt2, events[1]) == CuspClass::ordinary);

    // corrupted curvature value: formula and difference must disagree
    CuspEvent bad = events[1];
    bad.second_derivative_norm *= 10.0;
    CHECK_THROWS_AS(classify_cusp(c, sqrt2, bad), numerical_error);

    // corrupted location: no longer on the chord circle
    CuspEvent off = events[0];
    off.location = off.location + Vec2{0.5, 0.0};
    CHECK_THROWS_AS(classify_cusp(c, sqrt2, off), validation_error);

    CHECK_THROWS_AS(classify_cusp(c, -1.0, events[0]), validation_error);
}

TEST_CASE("a flattening alignment classifies as degenerate") {
    // Ellipse (cos t, 2 sin t) at its top: curvature 2, unit speed. A chord of
    // length 1/2 pointing straight down has |r''| = B^2/R - kappa B^2 = 0.
    ClosedCurve e = make_ellipse(2.0);
    CuspEvent ev;
    ev.time = pi / 2;
    ev.location = {0.0, 1.5};
    ev.branch = CuspEvent::Branch::inner;
    ev.phi_level = 1;
    ev.second_derivative_norm = 0.0;
    CHECK(classify_cusp(e, 0.5, ev) == CuspClass::degenerate);

    // the same chord on the outer side is an ordinary cusp
    CuspEvent outer = ev;
    outer.location = {0.0, 2.5};
    outer.branch = CuspEvent::Branch::outer;
    outer.phi_level = 0;
    outer.second_derivative_norm = 1.0 / 0.5 + 2.0; // B^2/R + kappa B^2 at the top
    CHECK(classify_cusp(e, 0.5, outer) == CuspClass::ordinary);
}

TEST_CASE("cusp counting: short chords give at most one alignment") {
    CuspCountReport rep = count_cusps_per_period(make_circle(1.0), 0.5, 0.0);
    CHECK(rep.regime == CuspCountReport::Regime::below_plateau);
    CHECK(rep.asserted);
    CHECK(rep.consistent);
    CHECK(rep.n_events <= 1);
}

TEST_CASE("cusp counting: locked long chords give 2q cusps per period") {
    const double R = 2.0 / std::sqrt(3.0);
    CuspCountReport rep = count_cusps_per_period(make_circle(1.0), R, 0.25);
    CHECK(rep.regime == CuspCountReport::Regime::above_max);
    CHECK(rep.asserted);
    CHECK(rep.p == 2);
    CHECK(rep.q == 1);
    CHECK(rep.minimal_period == Approx(4.0 * pi));
    CHECK(rep.n_events == 2);
    CHECK(rep.n_outer == 1);
    CHECK(rep.n_inner == 1);
    CHECK(rep.consistent);
    REQUIRE(rep.events.size() >= 2);
    CHECK(rep.events[1].time - rep.events[0].time == Approx(two_pi).margin(1e-6));
}

TEST_CASE("cusp counting: outside the two supported regimes") {
    // chord length inside the span of the radii of curvature
    CuspCountReport mid = count_cusps_per_period(make_ellipse(2.0), 1.0, 0.0);
    CHECK(mid.regime == CuspCountReport::Regime::unsupported);
    CHECK_FALSE(mid.asserted);
    CHECK(mid.note.find("hypothesis boundary") != std::string::npos);

    // non-convex base curve
    CuspCountReport fig = count_cusps_per_period(figure_eight(), 0.5, 0.0);
    CHECK(fig.regime == CuspCountReport::Regime::unsupported);
    CHECK_FALSE(fig.asserted);
    CHECK(fig.note.find("convex") != std::string::npos);

    CHECK_THROWS_AS(count_cusps_per_period(make_circle(1.0), -1.0, 0.0), validation_error);
    CHECK_THROWS_AS(count_cusps_per_period(make_circle(1.0), 1.0,
                                           std::numeric_limits<double>::quiet_NaN()),
                    validation_error);
}

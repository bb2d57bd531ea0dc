#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "shadowing/circle_oracle.hpp"
#include "shadowing/errors.hpp"
#include "shadowing/rotation.hpp"

using namespace shadowing;
using Catch::Approx;

namespace {

ClosedCurve figure_eight() {
    FourierCoeffs x, y;
    x.a = {1.0};
    y.b = {0.0, 1.0};
    return make_fourier(x, y);
}

} // namespace

TEST_CASE("rotation estimate obeys its stated error bound on the circle") {
    ClosedCurve c = make_circle(1.0);
    for (double R : {0.5, 1.0, std::sqrt(2.0), 2.0, 3.5}) {
        RotationEstimate est = rotation_number(c, R, 512, detail::scan_config());
        CHECK(est.periods_used == 512);
        CHECK(est.error_bound == Approx(1.0 / 512.0));
        CHECK(std::abs(est.value - rotation_number_circle(R)) < est.error_bound + 1e-6);
    }
    CHECK_THROWS_AS(rotation_number(c, 1.0, 15), validation_error);
    CHECK_THROWS_AS(rotation_number(c, 0.0, 64), validation_error);
    CHECK_THROWS_AS(rotation_number(c, 1.0, 64, detail::scan_config(),
                                    std::numeric_limits<double>::quiet_NaN()),
                    validation_error);
}

TEST_CASE("rotation estimate is independent of the initial angle") {
    ClosedCurve e = make_ellipse(2.0);
    const int n = 128;
    const double eb = 1.0 / n;
    std::vector<double> vals;
    for (double th0 : {0.0, 1.0, 2.0, std::numbers::pi})
        vals.push_back(rotation_number(e, 1.7, n, detail::scan_config(), th0).value);
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j)
            CHECK(std::abs(vals[i] - vals[j]) <= 2.0 * eb);
}

TEST_CASE("sweep evaluates a grid in order and validates it") {
    ClosedCurve c = make_circle(1.0);
    std::vector<double> grid{0.5, 1.0, 1.5, 2.0};
    auto pts = rotation_sweep(c, grid, detail::scan_config(), 128);
    REQUIRE(pts.size() == grid.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].R == grid[i]);
        REQUIRE(pts[i].ok);
        CHECK(pts[i].error.empty());
        CHECK(std::abs(pts[i].estimate.value - rotation_number_circle(grid[i])) <
              1.0 / 128.0 + 1e-6);
    }
    CHECK_THROWS_AS(rotation_sweep(c, {}, detail::scan_config(), 128), validation_error);
    CHECK_THROWS_AS(rotation_sweep(c, {-1.0, 2.0}, detail::scan_config(), 128),
                    validation_error);
    CHECK_THROWS_AS(rotation_sweep(c, {2.0, 1.0}, detail::scan_config(), 128),
                    validation_error);
    CHECK_THROWS_AS(rotation_sweep(c, {1.0, 1.0}, detail::scan_config(), 128),
                    validation_error);
}

TEST_CASE("perimeter bound on the rotation number") {
    ClosedCurve e = make_ellipse(2.0);
    const double len = perimeter(e);
    for (double R : {2.0, 5.0, 12.0}) {
        RotationEstimate est = rotation_number(e, R, 128, detail::scan_config());
        UpperBoundReport rep = check_upper_bound(e, est, R);
        CHECK(rep.bound == Approx(len / (two_pi * R)));
        CHECK(rep.pass);
        CHECK(rep.slack >= 0.0);
    }
    // a synthetic over-large estimate must fail the bound
    RotationEstimate fake;
    fake.value = 0.9;
    fake.error_bound = 0.0;
    fake.periods_used = 1024;
    CHECK_FALSE(check_upper_bound(e, fake, 12.0).pass);
}

TEST_CASE("far-field estimates follow the enclosed-area law") {
    ClosedCurve c = make_circle(1.0);
    auto ratios = asymptotic_area_ratio(c, {50.0, 100.0});
    REQUIRE(ratios.size() == 2);
    auto exact = [](double R) {
        return rotation_number_circle(R) * two_pi * R * R / std::numbers::pi;
    };
    // the finite-horizon deviation of theta enters the ratio scaled by
    // 2 pi R^2 / A0, so the tolerance has to grow with R
    CHECK(ratios[0] == Approx(exact(50.0)).margin(1e-2));
    CHECK(ratios[1] == Approx(exact(100.0)).margin(2e-2));
    CHECK(std::abs(ratios[0] - 1.0) < 2e-2);
    CHECK(std::abs(ratios[1] - 1.0) < 2e-2);

    CHECK_THROWS_AS(asymptotic_area_ratio(c, {}), validation_error);
    CHECK_THROWS_AS(asymptotic_area_ratio(c, {5.0}), validation_error);
    CHECK_THROWS_AS(asymptotic_area_ratio(figure_eight(), {100.0}), hypothesis_error);
}

TEST_CASE("guaranteed plateau radius and the plateau law") {
    CHECK(guaranteed_plateau_radius(make_circle(1.0)) == Approx(1.0).epsilon(1e-8));
    CHECK(guaranteed_plateau_radius(make_ellipse(2.0)) == Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(guaranteed_plateau_radius(figure_eight()), hypothesis_error);

    // inside the guaranteed radius the estimate sticks to the index
    for (double frac : {0.5, 0.9}) {
        RotationEstimate est =
            rotation_number(make_ellipse(2.0), frac * 0.5, 128, detail::scan_config());
        CHECK(std::abs(est.value - 1.0) < est.error_bound + 1e-6);
    }
}

TEST_CASE("critical distance of the circle is its radius") {
    ClosedCurve c = make_circle(1.0);
    const double tol = 1e-2;
    DistanceReport rep = critical_distance(c, tol, detail::scan_config(), 256);
    CHECK(rep.kind == DistanceReport::Kind::critical);
    CHECK(rep.bracket_low < rep.bracket_high);
    CHECK(rep.bracket_high - rep.bracket_low <= tol + 1e-12);
    CHECK(rep.estimate == rep.bracket_high);
    CHECK(std::abs(rep.estimate - 1.0) < 2.0 * tol);
    CHECK_FALSE(rep.heuristic);
    CHECK_FALSE(rep.diagnostics.empty());
    // diagnostics are sorted by distance
    for (std::size_t i = 1; i < rep.diagnostics.size(); ++i)
        CHECK(rep.diagnostics[i].first > rep.diagnostics[i - 1].first);
    // the estimate respects the perimeter ceiling
    CHECK(rep.estimate <= perimeter(c) / two_pi + tol);

    CHECK_THROWS_AS(critical_distance(c, 0.0), validation_error);
    CHECK_THROWS_AS(critical_distance(c, -1.0), validation_error);
    CHECK_THROWS_AS(critical_distance(figure_eight(), 1e-2), hypothesis_error);
}

TEST_CASE("turning distance of the circle coincides with the critical one") {
    ClosedCurve c = make_circle(1.0);
    DistanceReport rep = turning_distance(c, 5e-3, detail::scan_config(), 256);
    CHECK(rep.kind == DistanceReport::Kind::turning);
    CHECK(rep.heuristic);
    CHECK_FALSE(rep.note.empty());
    CHECK(std::abs(rep.estimate - 1.0) < 0.05);
    CHECK(rep.bracket_low < rep.bracket_high);
    CHECK_THROWS_AS(turning_distance(figure_eight(), 1e-2), hypothesis_error);
}

TEST_CASE("distance search hits a prescribed rotation number") {
    ClosedCurve c = make_circle(1.0);
    const double target = 0.5;
    const double exact = 2.0 / std::sqrt(3.0);

    DistanceReport autob =
        find_distance_for_rotation(c, target, std::nullopt, 1e-3, detail::scan_config(), 256);
    CHECK(autob.kind == DistanceReport::Kind::target_rotation);
    CHECK(std::abs(autob.estimate - exact) < 1e-2);
    CHECK(std::abs(autob.rho_at_estimate - target) < 1.0 / 256.0 + 1e-6);
    CHECK(autob.bracket_high - autob.bracket_low <= 1e-3 + 1e-12);

    DistanceReport manual = find_distance_for_rotation(c, target, std::pair{1.05, 2.0}, 1e-3,
                                                       detail::scan_config(), 256);
    CHECK(std::abs(manual.estimate - exact) < 1e-2);

    CHECK_THROWS_AS(find_distance_for_rotation(c, 1.5, std::nullopt, 1e-3), validation_error);
    CHECK_THROWS_AS(find_distance_for_rotation(c, 0.0, std::nullopt, 1e-3), validation_error);
    CHECK_THROWS_AS(find_distance_for_rotation(c, -0.3, std::nullopt, 1e-3), validation_error);
    CHECK_THROWS_AS(find_distance_for_rotation(c, 0.5, std::pair{2.0, 1.0}, 1e-3),
                    validation_error);
    CHECK_THROWS_AS(find_distance_for_rotation(c, 0.5, std::pair{3.0, 4.0}, 1e-3),
                    validation_error);
    CHECK_THROWS_AS(find_distance_for_rotation(figure_eight(), 0.5, std::nullopt, 1e-3),
                    hypothesis_error);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "shadowing/circle_oracle.hpp"
#include "shadowing/curve.hpp"
#include "shadowing/errors.hpp"

using namespace shadowing;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);
} // namespace

TEST_CASE("circle rotation number follows the two-regime law") {
    CHECK(rotation_number_circle(0.25) == 1.0);
    CHECK(rotation_number_circle(1.0) == 1.0);
    CHECK(rotation_number_circle(sqrt2) ==
          Approx(0.29289321881345248).margin(1e-15)); // 1 - 1/sqrt(2)
    CHECK(rotation_number_circle(2.0 / std::sqrt(3.0)) == Approx(0.5).margin(1e-15));
    CHECK(rotation_number_circle(17.0 / std::sqrt(264.0)) ==
          Approx(12.0 / 17.0).margin(1e-15));
    // monotone decreasing past the plateau, approaching zero
    CHECK(rotation_number_circle(5.0) < rotation_number_circle(2.0));
    CHECK(rotation_number_circle(1e6) == Approx(0.0).margin(1e-6));

    CHECK_THROWS_AS(rotation_number_circle(0.0), validation_error);
    CHECK_THROWS_AS(rotation_number_circle(-1.0), validation_error);
    CHECK_THROWS_AS(rotation_number_circle(std::numeric_limits<double>::infinity()),
                    validation_error);
    CHECK_THROWS_AS(rotation_number_circle(std::numeric_limits<double>::quiet_NaN()),
                    validation_error);
}

TEST_CASE("circle regime classification and auxiliary frequency") {
    CHECK(circle_regime(0.3).kind == CircleRegime::Kind::small);
    CHECK(circle_regime(1.0).kind == CircleRegime::Kind::critical);
    CHECK(circle_regime(3.0).kind == CircleRegime::Kind::large);
    CHECK(circle_regime(0.3).rho_R == 0.0);
    CHECK(circle_regime(1.0).rho_R == 0.0);
    CHECK(circle_regime(sqrt2).rho_R == Approx(-1.0 / sqrt2).margin(1e-15));
    for (double R : {1.0001, 2.0, 50.0}) {
        double w = circle_regime(R).rho_R;
        CHECK(w > -1.0);
        CHECK(w < 0.0);
    }
}

TEST_CASE("rest angles below the critical chord length") {
    auto [lo, hi] = equilibria(0.8);
    CHECK(lo == Approx(-2.4980915447965089).margin(1e-14));
    CHECK(hi == Approx(+2.4980915447965089).margin(1e-14));
    CHECK(hi - lo == Approx(pi + 2.0 * std::asin(0.8)).margin(1e-14));
    CHECK_THROWS_AS(equilibria(1.0), validation_error);
    CHECK_THROWS_AS(equilibria(1.5), validation_error);
    CHECK_THROWS_AS(equilibria(0.0), validation_error);

    // the attractor is a genuine fixed point of the flow
    double th = theta_oracle_circle(0.8, lo, 7.3);
    CHECK(th == Approx(7.3 + lo).margin(1e-12));
}

TEST_CASE("alignment times below the critical chord length") {
    CHECK(turning_time_small_R(0.8, pi / 4) ==
          Approx(0.37055664589034092).margin(1e-14));
    CHECK(turning_time_small_R(0.8, 3.0) ==
          Approx(0.57611796613602855).margin(1e-14));
    // theta0 = pi already sits on an alignment
    CHECK(turning_time_small_R(0.8, pi) == Approx(0.0).margin(1e-14));
    // negative alignment time: the crossing lies in the past
    CHECK(turning_time_small_R(0.8, -0.5) < 0.0);

    // self-consistency: the chord angle at tau is a multiple of pi
    for (double th0 : {pi / 4, 3.0, -0.5, 2.0}) {
        double tau = turning_time_small_R(0.8, th0);
        double phi = theta_oracle_circle(0.8, th0, tau) - tau;
        CHECK(std::abs(std::sin(phi)) < 1e-9);
    }

    auto [lo, hi] = equilibria(0.8);
    CHECK_THROWS_AS(turning_time_small_R(0.8, lo), validation_error);
    CHECK_THROWS_AS(turning_time_small_R(0.8, hi), validation_error);
}

TEST_CASE("critical chord length: closed-form driven point") {
    Vec2 p0 = sc_at_R_equal_1(0.0, 0.0);
    CHECK(p0.x == Approx(2.0).margin(1e-14));
    CHECK(p0.y == Approx(0.0).margin(1e-14));
    // every solution except the pinned one decays to the origin like 1/t
    for (double t : {100.0, -100.0}) {
        CHECK(norm(sc_at_R_equal_1(0.0, t)) < 0.03);
        CHECK(norm(sc_at_R_equal_1(2.0, t)) < 0.06);
    }
    CHECK_THROWS_AS(sc_at_R_equal_1(pi, 1.0), validation_error);
    CHECK_THROWS_AS(sc_at_R_equal_1(-pi, 1.0), validation_error);
    CHECK_THROWS_AS(sc_at_R_equal_1(3.0 * pi, 1.0), validation_error);

    CHECK(turning_time_R1(pi / 2) == Approx(1.0).margin(1e-14));
    CHECK(turning_time_R1(-pi / 2) == Approx(-1.0).margin(1e-14));
    CHECK_THROWS_AS(turning_time_R1(pi), validation_error);

    // consistency with the explicit theta law at R = 1
    double tau = turning_time_R1(pi / 2);
    double phi = theta_oracle_circle(1.0, pi / 2, tau) - tau;
    CHECK(std::abs(std::sin(phi)) < 1e-12);
}

TEST_CASE("time-of-angle map F and its inverse above the critical length") {
    CHECK(circle_F(sqrt2, 0.0) == 0.0);
    CHECK(circle_F(sqrt2, pi) == Approx(-pi * sqrt2).margin(1e-9));
    CHECK_THROWS_AS(circle_F(1.0, 0.5), validation_error);
    CHECK_THROWS_AS(circle_F_inverse(0.9, 0.5), validation_error);

    // branch rule: advancing the angle by one turn shifts time by 2 pi / rho_aux
    for (double R : {1.1, sqrt2, 5.0}) {
        double rho_aux = circle_regime(R).rho_R;
        for (double phi : {-2.0, 0.3, 2.8}) {
            CHECK(circle_F(R, phi + two_pi) - circle_F(R, phi) ==
                  Approx(two_pi / rho_aux).margin(1e-9));
        }
        // F is strictly decreasing along the lift
        CHECK(circle_F(R, 1.0) < circle_F(R, 0.0));

        for (int i = 0; i <= 40; ++i) {
            double phi = -10.0 + 0.5 * i;
            double back = circle_F_inverse(R, circle_F(R, phi));
            CHECK(back == Approx(phi).margin(1e-9));
        }
    }

    // one alignment spacing advances the co-rotating angle by exactly -pi
    CHECK(circle_phi_of_t(sqrt2, 0.0, pi * sqrt2) == Approx(-pi).margin(1e-9));
    CHECK(circle_phi_of_t(sqrt2, 0.0, 2.0 * pi * sqrt2) == Approx(-two_pi).margin(1e-9));
}

TEST_CASE("closed-form chord angle is self-consistent across regimes") {
    // above critical: F(theta(t) - t) = F(theta0) + t
    for (double t : {0.0, 0.3, 5.0, 20.0}) {
        double th = theta_oracle_circle(sqrt2, 1.0, t);
        CHECK(circle_F(sqrt2, th - t) == Approx(circle_F(sqrt2, 1.0) + t).margin(1e-9));
    }
    // initial condition is honored in every regime
    for (double R : {0.5, 1.0, 3.0})
        for (double th0 : {-2.0, 0.0, 1.7})
            CHECK(theta_oracle_circle(R, th0, 0.0) == Approx(th0).margin(1e-12));
    // shifting theta0 by a full turn shifts the whole solution
    for (double R : {0.6, 1.0, 2.5}) {
        CHECK(theta_oracle_circle(R, 0.4 + two_pi, 3.0) ==
              Approx(theta_oracle_circle(R, 0.4, 3.0) + two_pi).margin(1e-10));
    }
    // below critical: the co-rotating angle converges to the attractor
    auto [lo, hi] = equilibria(0.8);
    CHECK(theta_oracle_circle(0.8, 0.3, 60.0) - 60.0 == Approx(lo).margin(1e-10));
    CHECK(theta_oracle_circle(0.8, 3.0, 60.0) - 60.0 ==
          Approx(lo + two_pi).margin(1e-10));
    // at critical length the attractor is -pi, reached algebraically
    double drift = theta_oracle_circle(1.0, 0.5, 1e4) - 1e4;
    CHECK(drift == Approx(-pi).margin(1e-3));
}

TEST_CASE("alignment schedule above the critical chord length") {
    auto pts = turning_data_large_R(sqrt2, 0.0, 0, 3);
    REQUIRE(pts.size() == 4);
    const double spacing = pi * sqrt2;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].time == Approx(static_cast<double>(i) * spacing).margin(1e-12));
        CHECK(pts[i].outer == (i % 2 == 0));
        CHECK(pts[i].phi_level == -static_cast<long>(i));
        double expect_norm = pts[i].outer ? 1.0 + sqrt2 : sqrt2 - 1.0;
        CHECK(norm(pts[i].location) == Approx(expect_norm).margin(1e-12));
        // the driven point from the closed-form angle lands on the same spot
        double th = theta_oracle_circle(sqrt2, 0.0, pts[i].time);
        Vec2 r{std::cos(pts[i].time) + sqrt2 * std::cos(th),
               std::sin(pts[i].time) + sqrt2 * std::sin(th)};
        CHECK(distance(r, pts[i].location) < 1e-9);
    }

    // locked 2:1 orbit: two alignment sites per minimal period, then repeats
    double R21 = 2.0 / std::sqrt(3.0);
    auto locked = turning_data_large_R(R21, 0.25, 0, 2);
    REQUIRE(locked.size() == 3);
    CHECK(locked[1].time - locked[0].time == Approx(two_pi).margin(1e-12));
    CHECK(distance(locked[2].location, locked[0].location) < 1e-9);
    CHECK(distance(locked[1].location, locked[0].location) > 0.5);

    CHECK_THROWS_AS(turning_data_large_R(1.0, 0.0, 0, 1), validation_error);
    CHECK_THROWS_AS(turning_data_large_R(2.0, 0.0, 3, 1), validation_error);
}

TEST_CASE("chord lengths that lock to rational rotation numbers") {
    CHECK(subharmonic_distance(2, 1) == Approx(2.0 / std::sqrt(3.0)).margin(1e-15));
    CHECK(subharmonic_distance(3, 1) == Approx(3.0 / std::sqrt(8.0)).margin(1e-15));
    CHECK(subharmonic_distance(17, 5) ==
          Approx(1.0462776733243282).margin(1e-15));
    // the law: rotation number at the locking length is (p - q) / p
    for (auto [p, q] : {std::pair{2, 1}, {3, 2}, {5, 2}, {17, 5}}) {
        double R = subharmonic_distance(p, q);
        CHECK(rotation_number_circle(R) ==
              Approx(double(p - q) / double(p)).margin(1e-12));
    }
    // locking lengths accumulate at the critical length from above as q/p -> 0
    CHECK(subharmonic_distance(100, 1) == Approx(1.0).epsilon(1e-4));

    CHECK_THROWS_AS(subharmonic_distance(1, 1), validation_error);
    CHECK_THROWS_AS(subharmonic_distance(2, 3), validation_error);
    CHECK_THROWS_AS(subharmonic_distance(4, 2), validation_error);
    CHECK_THROWS_AS(subharmonic_distance(3, 0), validation_error);
}

#include "oracles.hpp"

#include <gfcstab/error.hpp>
#include <gfcstab/scenario.hpp>
#include <gfcstab/types.hpp>

#include <doctest.h>

#include <cmath>

using namespace gfcstab;
using namespace gfcstab::scenario;

TEST_CASE("quiet grid") {
	auto sig = build_signal({}, 50.0);
	for (double t : {0.0, 1.0, 7.3}) {
		auto s = sig.at(t);
		CHECK(s.vg == 1.0);
		CHECK(s.omega_pu == 1.0);
		CHECK(s.theta == 0.0);
	}
	CHECK(sig.breakpoints().empty());
	CHECK(sig.setpoint(3.0, 0.8) == 0.8);
}

TEST_CASE("RoCoF ramp frequency and phase") {
	auto sig = build_signal({RocofRamp{1.0, -1.0, 48.0}}, 50.0);
	CHECK(sig.at(0.5).omega_pu == 1.0);
	CHECK(sig.at(2.0).omega_pu * 50.0 == doctest::Approx(49.0));
	CHECK(sig.at(3.0).omega_pu * 50.0 == doctest::Approx(48.0));
	CHECK(sig.at(9.0).omega_pu * 50.0 == 48.0);
	REQUIRE(sig.breakpoints().size() == 2);
	CHECK(sig.breakpoints()[0] == 1.0);
	CHECK(sig.breakpoints()[1] == doctest::Approx(3.0));

	// Phase against a trapezoidal integral of w_B (w - 1).
	const double wb = sig.omega_base();
	for (double t : {0.7, 1.5, 3.0, 5.25}) {
		const double ref = oracle::trapezoid([&](double s) { return wb * (sig.at(s).omega_pu - 1.0); }, 0.0, t, 200000);
		CHECK(sig.at(t).theta == doctest::Approx(ref).epsilon(1e-8));
	}
	CHECK(sig.final_sample().omega_pu * 50.0 == 48.0);
}

TEST_CASE("rising ramp") {
	auto sig = build_signal({RocofRamp{0.0, 0.5, 51.0}}, 50.0);
	CHECK(sig.at(1.0).omega_pu * 50.0 == doctest::Approx(50.5));
	CHECK(sig.at(4.0).omega_pu * 50.0 == doctest::Approx(51.0));
	CHECK(sig.at(1.0).theta > 0.0);
}

TEST_CASE("phase jump advances the grid angle at the event") {
	auto sig = build_signal({PhaseJump{1.0, deg_to_rad(40.0)}}, 50.0);
	CHECK(sig.at(1.0, Side::Left).theta == 0.0);
	CHECK(sig.at(1.0, Side::Right).theta == doctest::Approx(deg_to_rad(40.0)));
	CHECK(sig.at(0.99).theta == 0.0);
	CHECK(sig.at(2.0).theta == doctest::Approx(deg_to_rad(40.0)));
	CHECK(sig.final_sample().theta == doctest::Approx(deg_to_rad(40.0)));
}

TEST_CASE("voltage dip window") {
	auto sig = build_signal({VoltageDip{1.0, 0.3, 0.5}}, 50.0);
	CHECK(sig.at(0.999).vg == 1.0);
	CHECK(sig.at(1.0, Side::Left).vg == 1.0);
	CHECK(sig.at(1.0, Side::Right).vg == 0.5);
	CHECK(sig.at(1.2).vg == 0.5);
	CHECK(sig.at(1.3, Side::Left).vg == 0.5);
	CHECK(sig.at(1.3, Side::Right).vg == 1.0);
	CHECK(sig.final_sample().vg == 1.0);
	REQUIRE(sig.breakpoints().size() == 2);
}

TEST_CASE("setpoint steps") {
	auto sig = build_signal({SetpointStep{2.0, 0.5}, SetpointStep{1.0, 0.7}}, 50.0);
	CHECK(sig.setpoint(0.5, 0.8) == 0.8);
	CHECK(sig.setpoint(1.0, 0.8, Side::Left) == 0.8);
	CHECK(sig.setpoint(1.0, 0.8, Side::Right) == 0.7);
	CHECK(sig.setpoint(3.0, 0.8) == 0.5);
	CHECK(sig.final_setpoint(0.8) == 0.5);
	// Events come back sorted by time.
	CHECK(event_time(sig.events().front()) == 1.0);
}

TEST_CASE("combined events keep their own effects") {
	auto sig = build_signal({RocofRamp{1.0, -1.0, 49.0}, PhaseJump{1.5, 0.1}, VoltageDip{0.5, 0.2, 0.7}}, 50.0);
	CHECK(sig.at(0.6).vg == 0.7);
	CHECK(sig.at(1.4).theta < 0.0);
	CHECK(sig.at(1.5).theta - sig.at(1.5, Side::Left).theta == doctest::Approx(0.1));
	CHECK(sig.breakpoints().size() == 5);
}

TEST_CASE("invalid event sets") {
	CHECK_THROWS_AS(build_signal({PhaseJump{-1.0, 0.1}}, 50.0), InvalidArgument);
	CHECK_THROWS_AS(build_signal({RocofRamp{1.0, 0.0, 48.0}}, 50.0), InvalidArgument);
	CHECK_THROWS_AS(build_signal({RocofRamp{1.0, 1.0, 48.0}}, 50.0), InvalidArgument);
	CHECK_THROWS_AS(build_signal({RocofRamp{1.0, -1.0, 48.0}, RocofRamp{2.0, -1.0, 47.0}}, 50.0), InvalidArgument);
	CHECK_THROWS_AS(build_signal({VoltageDip{1.0, 0.5, 0.5}, VoltageDip{1.2, 0.5, 0.5}}, 50.0), InvalidArgument);
	CHECK_THROWS_AS(build_signal({VoltageDip{1.0, 0.0, 0.5}}, 50.0), InvalidArgument);
	CHECK_THROWS_AS(build_signal({VoltageDip{1.0, 0.1, -0.5}}, 50.0), InvalidArgument);
	CHECK_THROWS_AS(build_signal({}, 0.0), InvalidArgument);
	CHECK_NOTHROW(build_signal({RocofRamp{1.0, -1.0, 48.0}, RocofRamp{3.0, 1.0, 50.0}}, 50.0));
}

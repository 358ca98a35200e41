#include "oracles.hpp"

#include <gfcstab/electrical.hpp>
#include <gfcstab/error.hpp>
#include <gfcstab/power_angle.hpp>

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

using namespace gfcstab;
using namespace gfcstab::electrical;

namespace {

const GfcParams gfc0{};
const NetworkParams net0{};

double degrees(double d) { return deg_to_rad(d); }

} // namespace

TEST_CASE("unsaturated current through the virtual impedance") {
	auto i = unsaturated_current(1.0, {0.9, 0.0}, 0.03, 0.3);
	CHECK(i.d == doctest::Approx(0.0330033).epsilon(1e-6));
	CHECK(i.q == doctest::Approx(-0.330033).epsilon(1e-6));
	CHECK_THROWS_AS(unsaturated_current(1.0, {0.9, 0.0}, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("limiter clamps magnitude and keeps the angle") {
	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> u(-3.0, 3.0);
	for (int k = 0; k < 500; ++k) {
		DqVector ref{u(rng), u(rng)};
		const double i_lim = 1.1;
		auto lim = apply_current_limit(ref, i_lim);
		const double mag = magnitude(ref);
		if (mag <= i_lim) {
			CHECK(lim.current == ref);
			CHECK(lim.kc_lim == 1.0);
		} else {
			CHECK(std::abs(magnitude(lim.current) - i_lim) < 1e-12);
			CHECK(std::abs(std::atan2(lim.current.q, lim.current.d) - std::atan2(ref.q, ref.d)) < 1e-12);
			CHECK(std::abs(lim.kc_lim * i_lim - mag) < 1e-12);
		}
	}
	CHECK(apply_current_limit({1.1, 0.0}, 1.1).kc_lim == 1.0);
	CHECK_THROWS_AS(apply_current_limit({1.0, 0.0}, 0.0), InvalidArgument);
}

TEST_CASE("unlimited curve peaks at 90 degrees") {
	auto p = measured_power(pi / 2, 1.0, 1.0, 0.5, 1000.0);
	CHECK_FALSE(p.limited);
	CHECK(p.p == doctest::Approx(2.0).epsilon(1e-15));
	CHECK(measured_power(0.0, 1.0, 1.0, 0.5, 1.1).p == 0.0);
}

TEST_CASE("limited branch matches i_lim cos(delta/2) for equal voltages") {
	for (double d = 35.0; d < 180.0; d += 2.5) {
		auto p = measured_power(degrees(d), 1.0, 1.0, 0.5, 1.1);
		REQUIRE(p.limited);
		CHECK(std::abs(p.p - 1.1 * std::cos(degrees(d) / 2)) < 1e-12);
	}
}

TEST_CASE("limited branch does not depend on the network reactance") {
	for (double d : {60.0, 90.0, 120.0, 170.0}) {
		const double ref = measured_power(degrees(d), 1.0, 1.0, 0.5, 1.1).p;
		for (double x : {0.4, 0.6, 0.7}) {
			auto p = measured_power(degrees(d), 1.0, 1.0, x, 1.1);
			REQUIRE(p.limited);
			CHECK(std::abs(p.p - ref) < 1e-12);
		}
	}
}

TEST_CASE("limiter activation angle") {
	auto a = limiter_activation_angle(1.0, 1.0, 0.5, 1.1);
	REQUIRE(a);
	CHECK(rad_to_deg(*a) == doctest::Approx(31.924028325694472).epsilon(1e-12));
	CHECK(std::abs(rad_to_deg(*a) - 31.93) <= 0.01);

	auto low = limiter_activation_angle(1.0, 0.5, 0.5, 1.1);
	REQUIRE(low);
	CHECK(rad_to_deg(*low) == doctest::Approx(18.648155305592987).epsilon(1e-12));

	// Never reached: the chord never exceeds 2 < 1000 * 0.5
	CHECK_FALSE(limiter_activation_angle(1.0, 1.0, 0.5, 1000.0));
	// Already saturated at delta = 0
	CHECK(*limiter_activation_angle(1.0, 0.1, 0.5, 1.1) == 0.0);
}

TEST_CASE("measured power branches meet at the activation angle") {
	for (double vg : {0.3, 0.5, 0.8, 1.0, 1.2}) {
		for (double x : {0.3, 0.5, 0.8}) {
			auto a = limiter_activation_angle(1.0, vg, x, 1.1);
			if (!a || *a == 0.0)
				continue;
			const double eps = 1e-11;
			const double below = measured_power(*a - eps, 1.0, vg, x, 1.1).p;
			const double above = measured_power(*a + eps, 1.0, vg, x, 1.1).p;
			CHECK(std::abs(below - above) < 1e-9);
			const double unlimited = vg * std::sin(*a) / x;
			const double limited = vg * std::sin(*a) / chord_length(1.0, vg, *a) * 1.1;
			CHECK(std::abs(unlimited - limited) < 1e-9);
		}
	}
}

TEST_CASE("composite limited curve maximum") {
	auto curve = power_angle::feedback_curve(FeedbackMode::Measured, gfc0, net0, 1.0);
	auto peak = power_angle::curve_maximum(curve, power_angle::kinks(gfc0, net0, 1.0));
	CHECK(peak.p == doctest::Approx(1.0575886487666177).epsilon(1e-10));
	CHECK(rad_to_deg(peak.delta) == doctest::Approx(31.924028325694472).epsilon(1e-8));
}

TEST_CASE("virtual power agrees with the phasor circuit") {
	for (double vg : {0.5, 1.0}) {
		for (double d = 1.0; d < 180.0; d += 3.0) {
			const double delta = degrees(d);
			auto sol = oracle::solve_circuit(delta, 1.0, vg, 0.3, 0.2, 1.1);
			auto v = virtual_power(delta, 1.0, vg, 0.3, 0.2, 1.1);
			CHECK(v.limited == sol.limited);
			CHECK(v.p == doctest::Approx(sol.p_virt).epsilon(1e-9));
			CHECK(v.kc_lim == doctest::Approx(sol.kc).epsilon(1e-9));
			auto m = measured_power(delta, 1.0, vg, 0.5, 1.1);
			CHECK(m.p == doctest::Approx(sol.p_pcc).epsilon(1e-9));
			CHECK(virtual_power_closed_form(delta, 1.0, vg, 0.3, 0.2, 1.1) ==
			      doctest::Approx(v.p).epsilon(1e-12));
		}
	}
}

TEST_CASE("virtual power at 60 degrees") {
	auto v = virtual_power(degrees(60.0), 1.0, 1.0, 0.3, 0.2, 1.1);
	REQUIRE(v.limited);
	CHECK(v.kc_lim == doctest::Approx(2.3636363636363633).epsilon(1e-12));
	CHECK(v.p == doctest::Approx(2.25166604983954).epsilon(1e-12));
	CHECK(std::abs(v.p - 2.252) < 1e-3);
}

TEST_CASE("saturated kc satisfies kc x_v + x_ext = M_v / i_lim") {
	for (double vg : {0.5, 1.0, 1.1}) {
		for (double d = 20.0; d <= 180.0; d += 5.0) {
			auto v = virtual_power(degrees(d), 1.0, vg, 0.3, 0.2, 1.1);
			if (!v.limited)
				continue;
			CHECK(std::abs(v.kc_lim * 0.3 + 0.2 - chord_length(1.0, vg, degrees(d)) / 1.1) < 1e-12);
		}
	}
}

TEST_CASE("below the limit virtual and measured power coincide") {
	auto a = *limiter_activation_angle(1.0, 1.0, 0.5, 1.1);
	for (int k = 0; k <= 100; ++k) {
		const double d = a * k / 100.0;
		CHECK(std::abs(virtual_power(d, 1.0, 1.0, 0.3, 0.2, 1.1).p - measured_power(d, 1.0, 1.0, 0.5, 1.1).p) < 1e-12);
	}
}

TEST_CASE("internal impedance of the saturated converter") {
	auto v = virtual_power(degrees(60.0), 1.0, 1.0, 0.3, 0.2, 1.1);
	auto z = internal_impedance(v.kc_lim, 0.03, 0.3);
	CHECK(z.x == doctest::Approx(0.709090909090909).epsilon(1e-12));
	CHECK(z.r == doctest::Approx(0.0709090909090909).epsilon(1e-12));
	// Scaling the whole path by 1/kc gives the virtual-power reactance.
	CHECK((z.x + 0.2) / v.kc_lim == doctest::Approx(0.3 + 0.2 / v.kc_lim).epsilon(1e-12));
	CHECK_THROWS_AS(internal_impedance(0.9, 0.03, 0.3), InvalidArgument);
}

TEST_CASE("operating point") {
	auto op = operating_point(degrees(60.0), gfc0, net0, 1.0);
	CHECK(op.limited);
	CHECK(op.i_mag_actual == doctest::Approx(1.1));
	// Reference current of the saturated circuit, not the unlimited network current.
	CHECK(op.i_mag_unsat == doctest::Approx(oracle::solve_circuit(degrees(60.0), 1.0, 1.0, 0.3, 0.2, 1.1).i_ref_mag));
	CHECK(op.i_mag_unsat == doctest::Approx(2.6));
	CHECK(op.p_pcc == doctest::Approx(1.1 * std::cos(degrees(30.0))));
	CHECK(op.p_virt == doctest::Approx(2.25166604983954));

	auto small = operating_point(degrees(10.0), gfc0, net0, 1.0);
	CHECK_FALSE(small.limited);
	CHECK(small.kc_lim == 1.0);
	CHECK(small.p_pcc == small.p_virt);
	CHECK(small.i_mag_actual == doctest::Approx(2.0 * std::sin(degrees(5.0)) / 0.5));

	CHECK(feedback_power(FeedbackMode::Measured, degrees(60.0), gfc0, net0, 1.0) == op.p_pcc);
	CHECK(feedback_power(FeedbackMode::Virtual, degrees(60.0), gfc0, net0, 1.0) == op.p_virt);
}

TEST_CASE("curve sweep") {
	auto c = sweep_curves(gfc0, net0, 1.0, 721);
	REQUIRE(c.deltas.size() == 721);
	CHECK(c.deltas.front() == 0.0);
	CHECK(c.deltas.back() == pi);
	CHECK(rad_to_deg(c.deltas[360]) == doctest::Approx(90.0));
	CHECK(c.p_unlimited[360] == doctest::Approx(2.0));
	REQUIRE(c.activation_delta);

	// Row nearest the activation angle carries the composite maximum.
	std::size_t arg = 0;
	for (std::size_t k = 0; k < c.deltas.size(); ++k)
		if (c.p_limited[k] > c.p_limited[arg])
			arg = k;
	CHECK(rad_to_deg(c.deltas[arg]) == doctest::Approx(32.0).epsilon(0.01));
	CHECK(c.p_limited[arg] == doctest::Approx(1.0575886487666177).epsilon(1e-3));

	GfcParams wide = gfc0;
	wide.i_lim = 1000.0;
	auto w = sweep_curves(wide, net0, 1.0, 721);
	for (std::size_t k = 0; k < w.deltas.size(); ++k) {
		CHECK(std::abs(w.p_limited[k] - w.p_unlimited[k]) < 1e-12);
		CHECK(std::abs(w.p_virtual[k] - w.p_unlimited[k]) < 1e-12);
	}
	CHECK_THROWS_AS(sweep_curves(gfc0, net0, 1.0, 1), InvalidArgument);
}

TEST_CASE("curve csv layout") {
	auto c = sweep_curves(gfc0, net0, 1.0, 5);
	std::ostringstream os;
	write_curve_csv(os, c);
	std::istringstream in(os.str());
	std::string line;
	std::getline(in, line);
	CHECK(line == "delta_deg,p_unlimited_pu,p_limited_pu,p_virtual_pu");
	int rows = 0;
	while (std::getline(in, line))
		++rows;
	CHECK(rows == 5);
}

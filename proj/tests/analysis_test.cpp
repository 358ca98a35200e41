#include "oracles.hpp"

#include <gfcstab/analysis.hpp>
#include <gfcstab/electrical.hpp>
#include <gfcstab/error.hpp>
#include <gfcstab/simulator.hpp>

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

using namespace gfcstab;
using namespace gfcstab::analysis;

namespace {

const GfcParams gfc0{};
const NetworkParams net0{};
constexpr auto kMeasured = FeedbackMode::Measured;
constexpr auto kVirtual = FeedbackMode::Virtual;
constexpr std::array<double, 5> kSetpoints{0.5, 0.6, 0.7, 0.8, 0.9};

double deg(double rad) { return rad_to_deg(rad); }

} // namespace

TEST_CASE("equilibria of the limited curve") {
	auto eq = find_equilibria(0.9, gfc0, net0, 1.0, kMeasured);
	CHECK(deg(eq.stable) == doctest::Approx(26.74368395040301).epsilon(1e-10));
	REQUIRE(eq.unstable);
	CHECK(deg(*eq.unstable) == doctest::Approx(70.19360245516921).epsilon(1e-10));
	// Falling branch: 1.1 cos(delta / 2) = 0.9
	CHECK(*eq.unstable == doctest::Approx(2.0 * std::acos(0.9 / 1.1)).epsilon(1e-12));

	auto virt = find_equilibria(0.9, gfc0, net0, 1.0, kVirtual);
	CHECK(virt.stable == doctest::Approx(eq.stable).epsilon(1e-12));
	CHECK(*virt.unstable > *eq.unstable);

	CHECK_THROWS_AS(find_equilibria(1.1, gfc0, net0, 1.0, kMeasured), Infeasible);
}

TEST_CASE("static phase-jump margin") {
	CHECK(deg(static_phase_jump_margin(0.9, gfc0, net0, kMeasured)) == doctest::Approx(43.4499185047662).epsilon(1e-9));
	CHECK(std::abs(deg(static_phase_jump_margin(0.9, gfc0, net0, kMeasured)) - 43.5) <= 0.1);
	// Zero loading: the margin is the unstable equilibrium itself.
	auto eq = find_equilibria(0.0, gfc0, net0, 1.0, kMeasured);
	CHECK(eq.stable == 0.0);
	CHECK(static_phase_jump_margin(0.0, gfc0, net0, kMeasured) == doctest::Approx(eq.unstable.value_or(pi)));
	CHECK(static_phase_jump_margin(0.0, gfc0, net0, kMeasured) == doctest::Approx(pi));
}

TEST_CASE("static margin does not depend on inertia or damping") {
	const double ref = static_phase_jump_margin(0.9, gfc0, net0, kMeasured);
	for (double h : {2.0, 10.0, 20.0}) {
		for (double zeta : {0.1, 0.4, 0.9}) {
			GfcParams g = gfc0;
			g.h_inertia = h;
			g.zeta = zeta;
			CHECK(static_phase_jump_margin(0.9, g, net0, kMeasured) == ref);
			CHECK(static_phase_jump_margin(0.9, g, net0, kVirtual) ==
			      static_phase_jump_margin(0.9, gfc0, net0, kVirtual));
		}
	}
}

TEST_CASE("deceleration power") {
	CHECK(deceleration_power(10.0, 50.0, -1.0) == 0.4);
	CHECK(std::abs(deceleration_power(10.0, 50.0, -1.0) - 0.4) <= 1e-12);
	CHECK(deceleration_power(10.0, 50.0, 1.0) == -0.4);
	CHECK(deceleration_power(5.0, 60.0, -0.6) == doctest::Approx(0.1));
	// A settled 2 Hz drop with 5 % droop adds 0.04 / 0.05 = 0.8 pu.
	CHECK(deceleration_power(10.0, 50.0, -1.0, 0.05, -0.04) == doctest::Approx(1.2));
}

TEST_CASE("static RoCoF limit") {
	const double r = static_max_rocof(0.8, gfc0, net0, kMeasured);
	CHECK(r == doctest::Approx(0.6439716219165442).epsilon(1e-9));
	CHECK(std::abs(r - 0.645) <= 0.005);
	// Equivalent statement: the deceleration power at the limit uses the full headroom.
	CHECK(0.8 + deceleration_power(10.0, 50.0, -r) == doctest::Approx(1.0575886487666177).epsilon(1e-9));

	SearchOptions up;
	up.rocof_delta_f = 2.0;
	CHECK(static_max_rocof(0.8, gfc0, net0, kMeasured, up) == doctest::Approx((0.8 + 1.0575886487666177) * 2.5));

	GfcParams droop = gfc0;
	droop.r_droop = 0.5;
	// Droop eats 0.04 / 0.5 = 0.08 pu of headroom.
	CHECK(static_max_rocof(0.8, droop, net0, kMeasured) ==
	      doctest::Approx((1.0575886487666177 - 0.8 - 0.08) * 2.5).epsilon(1e-9));
	CHECK(static_max_rocof(1.0, gfc0, net0, kVirtual) > static_max_rocof(1.0, gfc0, net0, kMeasured));
}

TEST_CASE("equal area against closed-form integrals") {
	// Classical curves: fault 1.0 sin(d), post-fault 2.0 sin(d).
	const double p = 0.8;
	auto fault = [](double d) { return std::sin(d); };
	auto post = [](double d) { return 2.0 * std::sin(d); };
	const double d0 = std::asin(0.4);
	const double du = pi - d0;
	const double dc = deg_to_rad(50.0);
	auto a = equal_area(p, fault, post, d0, dc, du);
	const double acc = p * (dc - d0) - (std::cos(d0) - std::cos(dc));
	const double dec = 2.0 * (std::cos(dc) - std::cos(du)) - p * (du - dc);
	CHECK(a.a_acc == doctest::Approx(acc).epsilon(1e-10));
	CHECK(a.a_dec == doctest::Approx(dec).epsilon(1e-10));
	CHECK(a.stable == (dec >= acc));

	auto cc = critical_clearing_angle(p, fault, post, d0, du);
	REQUIRE(cc);
	const double cos_cc = (p * (du - d0) + 2.0 * std::cos(du) - std::cos(d0)) / (2.0 - 1.0);
	CHECK(*cc == doctest::Approx(std::acos(cos_cc)).epsilon(1e-9));

	auto zero = equal_area(p, fault, post, d0, d0, du);
	CHECK(zero.a_acc == 0.0);
	CHECK(zero.stable);
	auto same = equal_area(p, post, post, d0, d0, du);
	CHECK(same.a_acc == 0.0);

	CHECK_THROWS_AS(equal_area(p, fault, post, d0, d0 - 0.1, du), InvalidArgument);
	CHECK_THROWS_AS(equal_area(p, fault, post, d0, du + 0.1, du), InvalidArgument);
}

TEST_CASE("dip areas for the 0.3 s dip to 0.5 pu") {
	auto r = dip_equal_area(0.8, 0.5, 0.3, gfc0, net0, kMeasured);
	REQUIRE(r.delta_u_post);
	CHECK(r.delta_clear > r.delta0);
	// Brute-force integrals over the library's own curves, kinks included.
	auto fault = [](double d) { return electrical::measured_power(d, 1.0, 0.5, 0.5, 1.1).p; };
	auto post = [](double d) { return electrical::measured_power(d, 1.0, 1.0, 0.5, 1.1).p; };
	const double acc = oracle::trapezoid([&](double d) { return 0.8 - fault(d); }, r.delta0, r.delta_clear, 200000);
	const double dec =
		oracle::trapezoid([&](double d) { return post(d) - 0.8; }, r.delta_clear, *r.delta_u_post, 200000);
	CHECK(r.areas.a_acc == doctest::Approx(acc).epsilon(1e-7));
	CHECK(r.areas.a_dec == doctest::Approx(dec).epsilon(1e-7));
	CHECK(r.areas.a_acc > r.areas.a_dec);
	CHECK_FALSE(r.areas.stable);

	auto none = dip_equal_area(0.8, 0.5, 0.0, gfc0, net0, kMeasured);
	CHECK(none.areas.a_acc == 0.0);
	CHECK(none.areas.stable);
}

TEST_CASE("margin csv rows") {
	MarginReport r;
	r.delta_margin_static = deg_to_rad(63.0);
	r.cct = {2.0, true, false};
	std::ostringstream os;
	write_margin_csv(os, {r, r});
	const std::string csv = os.str();
	CHECK(csv.rfind("mode,margin,static,dynamic,unit,note\n", 0) == 0);
	CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
	CHECK(csv.find("measured,cct,,2.000000,s,search ceiling reached") != std::string::npos);
	std::ostringstream table;
	write_margin_table(table, {r});
	CHECK(table.str().find(">=2.000") != std::string::npos);
}

TEST_SUITE("slow") {

TEST_CASE("dynamic phase-jump margin is tighter than the static one") {
	const double st = static_phase_jump_margin(0.9, gfc0, net0, kMeasured);
	auto dy = dynamic_phase_jump_margin(0.9, gfc0, net0, kMeasured);
	CHECK_FALSE(dy.at_ceiling);
	CHECK(dy.value < st);
	CHECK_FALSE(survives_phase_jump(deg_to_rad(40.0), 0.9, gfc0, net0, kMeasured));
	CHECK(survives_phase_jump(deg_to_rad(40.0), 0.9, gfc0, net0, kVirtual));
	CHECK(max_phase_jump(0.9, gfc0, net0, kMeasured, true) == dy.value);
	CHECK(max_phase_jump(0.9, gfc0, net0, kMeasured, false) == st);
}

TEST_CASE("dynamic RoCoF search brackets 1 Hz/s as unsustainable") {
	auto r = dynamic_max_rocof(0.8, gfc0, net0, kMeasured);
	CHECK_FALSE(r.at_ceiling);
	CHECK_FALSE(r.at_floor);
	CHECK(r.value < 1.0);
	CHECK_FALSE(survives_rocof(1.0, 0.8, gfc0, net0, kMeasured));
	CHECK(survives_rocof(1.0, 0.8, gfc0, net0, kVirtual));
	auto both = max_rocof(0.8, gfc0, net0, kMeasured);
	CHECK(both.dynamic.value == r.value);
}

TEST_CASE("margins shrink with loading") {
	for (auto mode : {kMeasured, kVirtual}) {
		CAPTURE(to_string(mode));
		double jump_st = 1e9, jump_dy = 1e9, rocof_st = 1e9, rocof_dy = 1e9, cct = 1e9;
		for (double p : kSetpoints) {
			CAPTURE(p);
			const double js = static_phase_jump_margin(p, gfc0, net0, mode);
			const double jd = dynamic_phase_jump_margin(p, gfc0, net0, mode).value;
			const double rs = static_max_rocof(p, gfc0, net0, mode);
			const double rd = dynamic_max_rocof(p, gfc0, net0, mode).value;
			const double c = critical_clearing_time(p, 0.5, gfc0, net0, mode).value;
			CHECK(js <= jump_st);
			CHECK(jd <= jump_dy);
			CHECK(rs <= rocof_st);
			CHECK(rd <= rocof_dy);
			CHECK(c <= cct);
			jump_st = js, jump_dy = jd, rocof_st = rs, rocof_dy = rd, cct = c;
		}
	}
}

TEST_CASE("clearing time grows with the retained voltage") {
	double last = -1.0;
	for (double v : {0.1, 0.3, 0.5, 0.7, 0.9}) {
		CAPTURE(v);
		const double c = critical_clearing_time(0.8, v, gfc0, net0, kMeasured).value;
		CHECK(c >= last);
		last = c;
	}
}

TEST_CASE("virtual feedback never loses margin") {
	for (double p : {0.5, 0.8, 0.9}) {
		CAPTURE(p);
		CHECK(static_phase_jump_margin(p, gfc0, net0, kVirtual) >= static_phase_jump_margin(p, gfc0, net0, kMeasured));
		CHECK(dynamic_phase_jump_margin(p, gfc0, net0, kVirtual).value >=
		      dynamic_phase_jump_margin(p, gfc0, net0, kMeasured).value);
		CHECK(static_max_rocof(p, gfc0, net0, kVirtual) >= static_max_rocof(p, gfc0, net0, kMeasured));
		CHECK(dynamic_max_rocof(p, gfc0, net0, kVirtual).value >= dynamic_max_rocof(p, gfc0, net0, kMeasured).value);
		CHECK(critical_clearing_time(p, 0.5, gfc0, net0, kVirtual).value >=
		      critical_clearing_time(p, 0.5, gfc0, net0, kMeasured).value);
	}
}

TEST_CASE("equal-area clearing time agrees with the undamped simulation") {
	GfcParams undamped = gfc0;
	undamped.zeta = 0.0;
	for (double v : {0.1, 0.3, 0.5, 0.7}) {
		CAPTURE(v);
		const double eac = eac_clearing_time(0.8, v, undamped, net0, kMeasured);
		const double sim = critical_clearing_time(0.8, v, undamped, net0, kMeasured).value;
		CHECK(eac > 0.0);
		CHECK(std::abs(sim - eac) <= 0.1 * eac);
	}
}

TEST_CASE("damped clearing time is at least the undamped equal-area prediction") {
	GfcParams undamped = gfc0;
	undamped.zeta = 0.0;
	for (double v : {0.1, 0.3, 0.5, 0.7}) {
		CAPTURE(v);
		const double eac = eac_clearing_time(0.8, v, undamped, net0, kMeasured);
		CHECK(critical_clearing_time(0.8, v, gfc0, net0, kMeasured).value >= eac);
	}
}

TEST_CASE("margin report is deterministic") {
	MarginRequest req;
	auto a = compute_margins(gfc0, net0, kMeasured, req);
	auto b = compute_margins(gfc0, net0, kMeasured, req);
	CHECK(a.delta_margin_dynamic.value == b.delta_margin_dynamic.value);
	CHECK(a.rocof_max_dynamic.value == b.rocof_max_dynamic.value);
	CHECK(a.cct.value == b.cct.value);
	CHECK(a.eac.areas.a_acc == b.eac.areas.a_acc);
	CHECK(a.delta_margin_static == static_phase_jump_margin(0.8, gfc0, net0, kMeasured));
}

} // TEST_SUITE

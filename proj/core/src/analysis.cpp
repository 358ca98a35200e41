#include <gfcstab/analysis.hpp>
#include <gfcstab/error.hpp>
#include <gfcstab/scenario.hpp>
#include <gfcstab/simulator.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace gfcstab::analysis {

namespace {

GfcParams with_setpoint(GfcParams gfc, double p_set, FeedbackMode mode) {
	gfc.p_set = p_set;
	gfc.feedback_mode = mode;
	return gfc;
}

bool survives(std::vector<scenario::Event> events, double t_end, const GfcParams& gfc, const NetworkParams& net,
              const SearchOptions& opts) {
	const scenario::GridSignal signal = scenario::build_signal(std::move(events), net.f_nominal, net.vg_nominal);
	simulator::SimConfig cfg;
	cfg.t_end = t_end;
	cfg.dt = opts.dt;
	cfg.record_every = std::max(1, static_cast<int>(std::lround(0.05 / opts.dt)));
	return simulator::run(signal, gfc, net, cfg).verdict.stable();
}

/// Largest stable setting in [lo, hi] assuming stability is monotone in it.
SearchResult largest_stable(const std::function<bool(double)>& stable, double lo, double hi, double resolution) {
	if (stable(hi))
		return {hi, true, false};
	if (!stable(lo))
		return {lo, false, true};
	while (hi - lo > resolution) {
		const double mid = 0.5 * (lo + hi);
		if (stable(mid))
			lo = mid;
		else
			hi = mid;
	}
	return {lo, false, false};
}

double integrate(const std::function<double(double)>& f, double a, double b, const std::vector<double>& splits) {
	if (b <= a)
		return 0.0;
	std::vector<double> pts{a};
	for (double s : splits)
		if (s > a && s < b)
			pts.push_back(s);
	pts.push_back(b);
	std::sort(pts.begin(), pts.end());
	double sum = 0.0;
	for (std::size_t k = 0; k + 1 < pts.size(); ++k)
		sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, pts[k], pts[k + 1], 15, 1e-12);
	return sum;
}

std::vector<double> merged_kinks(const GfcParams& gfc, const NetworkParams& net, double vg_a, double vg_b) {
	std::vector<double> k = power_angle::kinks(gfc, net, vg_a);
	for (double d : power_angle::kinks(gfc, net, vg_b))
		k.push_back(d);
	return k;
}

/// Sustained-fault trajectory starting from the pre-fault equilibrium.
simulator::Trajectory fault_on(double v_dip, double duration, const GfcParams& gfc, const NetworkParams& net,
                               const SearchOptions& opts) {
	const scenario::GridSignal signal = scenario::build_signal(
		{scenario::VoltageDip{opts.event_time, duration, v_dip}}, net.f_nominal, net.vg_nominal);
	simulator::SimConfig cfg;
	cfg.t_end = opts.event_time + duration;
	cfg.dt = opts.dt;
	return simulator::run(signal, gfc, net, cfg);
}

} // namespace

Equilibria find_equilibria(double p_set, const GfcParams& gfc, const NetworkParams& net, double vg, FeedbackMode mode) {
	const power_angle::Curve curve = power_angle::feedback_curve(mode, gfc, net, vg);
	const power_angle::Peak peak = power_angle::curve_maximum(curve, power_angle::kinks(gfc, net, vg));
	Equilibria eq;
	eq.stable = power_angle::rising_crossing(curve, p_set, peak);
	eq.unstable = power_angle::falling_crossing(curve, p_set, peak);
	return eq;
}

double static_phase_jump_margin(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode) {
	const Equilibria eq = find_equilibria(p_set, gfc, net, net.vg_nominal, mode);
	return eq.unstable.value_or(pi) - eq.stable;
}

bool survives_phase_jump(double jump, double p_set, const GfcParams& gfc, const NetworkParams& net,
                         FeedbackMode mode, const SearchOptions& opts) {
	return survives({scenario::PhaseJump{opts.event_time, jump}}, opts.event_time + opts.settle_time,
	                with_setpoint(gfc, p_set, mode), net, opts);
}

SearchResult dynamic_phase_jump_margin(double p_set, const GfcParams& gfc, const NetworkParams& net,
                                       FeedbackMode mode, const SearchOptions& opts) {
	SearchResult worst{opts.jump_ceiling, true, false};
	for (double direction : {1.0, -1.0}) {
		const SearchResult r = largest_stable(
			[&](double mag) { return survives_phase_jump(direction * mag, p_set, gfc, net, mode, opts); }, 0.0,
			opts.jump_ceiling, opts.jump_resolution);
		if (r.value < worst.value || (r.value == worst.value && !r.at_ceiling))
			worst = r;
	}
	return worst;
}

double max_phase_jump(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                      bool use_simulation, const SearchOptions& opts) {
	if (use_simulation)
		return dynamic_phase_jump_margin(p_set, gfc, net, mode, opts).value;
	return static_phase_jump_margin(p_set, gfc, net, mode);
}

double deceleration_power(double h, double f_nominal, double rocof, double r_droop, double delta_f_pu) {
	// Steady tracking of a frequency ramp by the lead-lag controller needs a
	// power error of 2H/f_n * RoCoF, and the droop adds -df/R_d once settled.
	const double droop = r_droop > 0.0 ? delta_f_pu / r_droop : 0.0;
	return -2.0 * h / f_nominal * rocof - droop;
}

double static_max_rocof(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                        const SearchOptions& opts) {
	const power_angle::Curve curve = power_angle::feedback_curve(mode, gfc, net, net.vg_nominal);
	const double peak = power_angle::curve_maximum(curve, power_angle::kinks(gfc, net, net.vg_nominal)).p;
	const double delta_f_pu = opts.rocof_delta_f / net.f_nominal;
	const double droop = gfc.r_droop > 0.0 ? delta_f_pu / gfc.r_droop : 0.0;
	// Falling frequency pushes the output up towards +peak, rising frequency
	// pulls it down towards -peak (the curve is odd in delta).
	const double headroom = opts.rocof_delta_f <= 0.0 ? peak - p_set + droop : p_set + peak - droop;
	return std::max(0.0, headroom) * net.f_nominal / (2.0 * gfc.h_inertia);
}

bool survives_rocof(double rocof, double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                    const SearchOptions& opts) {
	if (rocof == 0.0 || opts.rocof_delta_f == 0.0)
		return survives({}, opts.event_time + opts.settle_time, with_setpoint(gfc, p_set, mode), net, opts);
	const double rate = std::copysign(std::abs(rocof), opts.rocof_delta_f);
	const double ramp = std::abs(opts.rocof_delta_f / rocof);
	return survives({scenario::RocofRamp{opts.event_time, rate, net.f_nominal + opts.rocof_delta_f}},
	                opts.event_time + ramp + opts.settle_time, with_setpoint(gfc, p_set, mode), net, opts);
}

SearchResult dynamic_max_rocof(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                               const SearchOptions& opts) {
	return largest_stable([&](double r) { return survives_rocof(r, p_set, gfc, net, mode, opts); }, 0.0,
	                      opts.rocof_ceiling, opts.rocof_resolution);
}

RocofMargins max_rocof(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                       const SearchOptions& opts) {
	return {static_max_rocof(p_set, gfc, net, mode, opts), dynamic_max_rocof(p_set, gfc, net, mode, opts)};
}

bool survives_dip(double duration, double v_dip, double p_set, const GfcParams& gfc, const NetworkParams& net,
                  FeedbackMode mode, const SearchOptions& opts) {
	return survives({scenario::VoltageDip{opts.event_time, duration, v_dip}},
	                opts.event_time + duration + opts.settle_time, with_setpoint(gfc, p_set, mode), net, opts);
}

SearchResult critical_clearing_time(double p_set, double v_dip, const GfcParams& gfc, const NetworkParams& net,
                                    FeedbackMode mode, const SearchOptions& opts) {
	if (!(v_dip >= 0.0 && v_dip < net.vg_nominal))
		throw InvalidArgument(fmt::format("dip voltage must lie in [0, {}) pu (got {})", net.vg_nominal, v_dip));
	return largest_stable([&](double d) { return survives_dip(d, v_dip, p_set, gfc, net, mode, opts); },
	                      opts.cct_resolution, opts.cct_ceiling, opts.cct_resolution);
}

EqualArea equal_area(double p_set, const power_angle::Curve& fault_curve, const power_angle::Curve& post_curve,
                     double delta0, double delta_clear, double delta_u_post, const std::vector<double>& kinks) {
	if (delta_clear < delta0 || delta_clear > delta_u_post)
		throw InvalidArgument(fmt::format("clearing angle {} rad outside [{}, {}]", delta_clear, delta0, delta_u_post));
	EqualArea out;
	out.a_acc = integrate([&](double d) { return p_set - fault_curve(d); }, delta0, delta_clear, kinks);
	out.a_dec = integrate([&](double d) { return post_curve(d) - p_set; }, delta_clear, delta_u_post, kinks);
	out.stable = out.a_dec >= out.a_acc;
	return out;
}

std::optional<double> critical_clearing_angle(double p_set, const power_angle::Curve& fault_curve,
                                              const power_angle::Curve& post_curve, double delta0,
                                              double delta_u_post, const std::vector<double>& kinks) {
	const auto margin = [&](double dc) {
		const EqualArea a = equal_area(p_set, fault_curve, post_curve, delta0, dc, delta_u_post, kinks);
		return a.a_dec - a.a_acc;
	};
	if (margin(delta0) < 0.0)
		return std::nullopt;
	if (margin(delta_u_post) >= 0.0)
		return delta_u_post;
	return power_angle::bisect(margin, delta0, delta_u_post);
}

DipEqualArea dip_equal_area(double p_set, double v_dip, double duration, const GfcParams& gfc,
                            const NetworkParams& net, FeedbackMode mode, const SearchOptions& opts) {
	const GfcParams g = with_setpoint(gfc, p_set, mode);
	DipEqualArea out;
	const Equilibria post = find_equilibria(p_set, g, net, net.vg_nominal, mode);
	out.delta0 = post.stable;
	out.delta_u_post = post.unstable;
	out.delta_clear = duration > 0.0 ? fault_on(v_dip, duration, g, net, opts).delta.back() : out.delta0;

	const power_angle::Curve fault = power_angle::feedback_curve(mode, g, net, v_dip);
	const power_angle::Curve post_curve = power_angle::feedback_curve(mode, g, net, net.vg_nominal);
	const std::vector<double> kinks = merged_kinks(g, net, v_dip, net.vg_nominal);
	const double d_u = post.unstable.value_or(pi);
	if (out.delta_clear <= d_u) {
		out.areas = equal_area(p_set, fault, post_curve, out.delta0, std::max(out.delta_clear, out.delta0), d_u, kinks);
	} else {
		out.areas.a_acc = integrate([&](double d) { return p_set - fault(d); }, out.delta0, out.delta_clear, kinks);
		out.areas.a_dec = 0.0;
		out.areas.stable = false;
	}
	return out;
}

double eac_clearing_time(double p_set, double v_dip, const GfcParams& gfc, const NetworkParams& net,
                         FeedbackMode mode, const SearchOptions& opts) {
	const GfcParams g = with_setpoint(gfc, p_set, mode);
	const Equilibria post = find_equilibria(p_set, g, net, net.vg_nominal, mode);
	const double d_u = post.unstable.value_or(pi);
	const std::optional<double> critical =
		critical_clearing_angle(p_set, power_angle::feedback_curve(mode, g, net, v_dip),
		                        power_angle::feedback_curve(mode, g, net, net.vg_nominal), post.stable, d_u,
		                        merged_kinks(g, net, v_dip, net.vg_nominal));
	if (!critical)
		return 0.0;

	const simulator::Trajectory traj = fault_on(v_dip, opts.settle_time, g, net, opts);
	for (std::size_t k = 1; k < traj.size(); ++k) {
		if (traj.delta[k] >= *critical && traj.t[k] > opts.event_time) {
			const double frac = (*critical - traj.delta[k - 1]) / (traj.delta[k] - traj.delta[k - 1]);
			return traj.t[k - 1] + frac * (traj.t[k] - traj.t[k - 1]) - opts.event_time;
		}
	}
	return std::numeric_limits<double>::infinity();
}

MarginReport compute_margins(const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                             const MarginRequest& request, const SearchOptions& opts) {
	gfc.validate();
	net.validate();

	MarginReport report;
	report.mode = mode;
	report.p_set = request.p_set;
	report.delta_margin_static = static_phase_jump_margin(request.p_set, gfc, net, mode);
	report.rocof_max_static = static_max_rocof(request.p_set, gfc, net, mode, opts);

	auto jump = std::async(std::launch::async,
	                       [&] { return dynamic_phase_jump_margin(request.p_set, gfc, net, mode, opts); });
	auto rocof = std::async(std::launch::async, [&] { return dynamic_max_rocof(request.p_set, gfc, net, mode, opts); });
	auto cct = std::async(std::launch::async, [&] {
		return critical_clearing_time(request.p_set, request.v_dip, gfc, net, mode, opts);
	});
	report.eac = dip_equal_area(request.p_set, request.v_dip, request.eac_duration, gfc, net, mode, opts);
	report.delta_margin_dynamic = jump.get();
	report.rocof_max_dynamic = rocof.get();
	report.cct = cct.get();
	return report;
}

namespace {

std::string search_text(const SearchResult& r, double scale, int precision) {
	std::string s = fmt::format("{:.{}f}", r.value * scale, precision);
	if (r.at_ceiling)
		return ">=" + s;
	if (r.at_floor)
		return "<" + s;
	return s;
}

std::string search_note(const SearchResult& r) {
	if (r.at_ceiling)
		return "search ceiling reached";
	if (r.at_floor)
		return "unstable at smallest probe";
	return "";
}

} // namespace

void write_margin_table(std::ostream& os, const std::vector<MarginReport>& reports) {
	os << fmt::format("{:<9} {:>6} {:>12} {:>12} {:>12} {:>12} {:>10} {:>10} {:>10}\n", "mode", "p_set",
	                  "jump_st[deg]", "jump_dy[deg]", "rocof_st", "rocof_dy", "cct[s]", "eac_acc", "eac_dec");
	for (const MarginReport& r : reports)
		os << fmt::format("{:<9} {:>6.3f} {:>12.2f} {:>12} {:>12.3f} {:>12} {:>10} {:>10.4f} {:>10.4f}\n",
		                  to_string(r.mode), r.p_set, rad_to_deg(r.delta_margin_static),
		                  search_text(r.delta_margin_dynamic, 180.0 / pi, 2), r.rocof_max_static,
		                  search_text(r.rocof_max_dynamic, 1.0, 3), search_text(r.cct, 1.0, 3), r.eac.areas.a_acc,
		                  r.eac.areas.a_dec);
}

void write_margin_csv(std::ostream& os, const std::vector<MarginReport>& reports) {
	os << "mode,margin,static,dynamic,unit,note\n";
	for (const MarginReport& r : reports) {
		const auto mode = to_string(r.mode);
		os << fmt::format("{},phase_jump,{:.6f},{:.6f},deg,{}\n", mode, rad_to_deg(r.delta_margin_static),
		                  rad_to_deg(r.delta_margin_dynamic.value), search_note(r.delta_margin_dynamic));
		os << fmt::format("{},rocof,{:.6f},{:.6f},Hz/s,{}\n", mode, r.rocof_max_static, r.rocof_max_dynamic.value,
		                  search_note(r.rocof_max_dynamic));
		os << fmt::format("{},cct,,{:.6f},s,{}\n", mode, r.cct.value, search_note(r.cct));
		os << fmt::format("{},eac_accelerating_area,{:.9f},,pu*rad,clearing delta {:.4f} deg\n", mode,
		                  r.eac.areas.a_acc, rad_to_deg(r.eac.delta_clear));
		os << fmt::format("{},eac_decelerating_area,{:.9f},,pu*rad,{}\n", mode, r.eac.areas.a_dec,
		                  r.eac.areas.stable ? "a_dec >= a_acc" : "a_dec < a_acc");
	}
}

} // namespace gfcstab::analysis

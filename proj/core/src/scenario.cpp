#include <gfcstab/error.hpp>
#include <gfcstab/scenario.hpp>
#include <gfcstab/types.hpp>

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace gfcstab::scenario {

namespace {

template <class... Ts>
struct overloaded : Ts... {
	using Ts::operator()...;
};

bool before(double t_event, double t, Side side) {
	return side == Side::Right ? t_event <= t : t_event < t;
}

} // namespace

double event_time(const Event& event) {
	return std::visit(overloaded{[](const RocofRamp& e) { return e.t_start; },
	                             [](const PhaseJump& e) { return e.t; },
	                             [](const VoltageDip& e) { return e.t_start; },
	                             [](const SetpointStep& e) { return e.t; }},
	                  event);
}

double GridSignal::omega_base() const { return 2.0 * pi * mFNominal; }

double GridSignal::smooth_phase(double t) const {
	// Last segment with t0 <= t; the phase is continuous so the side does not matter.
	auto it = std::upper_bound(mFrequency.begin(), mFrequency.end(), t,
	                           [](double value, const FrequencySegment& s) { return value < s.t0; });
	const FrequencySegment& seg = *std::prev(it);
	const double tau = t - seg.t0;
	return seg.theta0 + omega_base() * ((seg.omega0 - 1.0) * tau + 0.5 * seg.slope * tau * tau);
}

GridSample GridSignal::at(double t, Side side) const {
	GridSample s;
	auto it = std::upper_bound(mFrequency.begin(), mFrequency.end(), t,
	                           [](double value, const FrequencySegment& seg) { return value < seg.t0; });
	const FrequencySegment& seg = *std::prev(it);
	s.omega_pu = seg.omega0 + seg.slope * (t - seg.t0);
	s.theta = smooth_phase(t);
	for (const PhaseJump& j : mJumps)
		if (before(j.t, t, side))
			s.theta += j.delta_theta;
	s.vg = mVgNominal;
	for (const Dip& d : mDips)
		if (before(d.t0, t, side) && !before(d.t1, t, side))
			s.vg = d.v;
	return s;
}

double GridSignal::setpoint(double t, double fallback, Side side) const {
	double p = fallback;
	for (const SetpointStep& s : mSetpoints)
		if (before(s.t, t, side))
			p = s.p_set;
	return p;
}

GridSample GridSignal::final_sample() const {
	GridSample s;
	s.omega_pu = mFrequency.back().omega0;
	s.vg = mVgNominal;
	s.theta = 0.0;
	for (const PhaseJump& j : mJumps)
		s.theta += j.delta_theta;
	return s;
}

double GridSignal::final_setpoint(double fallback) const {
	return mSetpoints.empty() ? fallback : mSetpoints.back().p_set;
}

GridSignal build_signal(std::vector<Event> events, double f_nominal, double vg_nominal) {
	if (!(f_nominal > 0.0))
		throw InvalidArgument(fmt::format("nominal frequency must be positive (got {})", f_nominal));
	if (!(vg_nominal > 0.0))
		throw InvalidArgument(fmt::format("grid voltage must be positive (got {})", vg_nominal));

	std::stable_sort(events.begin(), events.end(),
	                 [](const Event& a, const Event& b) { return event_time(a) < event_time(b); });

	GridSignal sig;
	sig.mFNominal = f_nominal;
	sig.mVgNominal = vg_nominal;
	sig.mFrequency.push_back({0.0, 1.0, 0.0, 0.0});
	const double omega_base = sig.omega_base();

	double ramp_busy_until = 0.0;
	auto close_segment_at = [&](double t) {
		// Append a segment boundary at t, carrying the integrated phase forward.
		GridSignal::FrequencySegment& last = sig.mFrequency.back();
		const double tau = t - last.t0;
		GridSignal::FrequencySegment next;
		next.t0 = t;
		next.omega0 = last.omega0 + last.slope * tau;
		next.slope = 0.0;
		next.theta0 = last.theta0 + omega_base * ((last.omega0 - 1.0) * tau + 0.5 * last.slope * tau * tau);
		if (t == last.t0)
			last = next;
		else
			sig.mFrequency.push_back(next);
	};

	for (const Event& ev : events) {
		const double t = event_time(ev);
		if (!std::isfinite(t) || t < 0.0)
			throw InvalidArgument(fmt::format("event time must be finite and non-negative (got {})", t));

		std::visit(overloaded{
			[&](const RocofRamp& r) {
				if (!std::isfinite(r.rate) || r.rate == 0.0)
					throw InvalidArgument("RoCoF rate must be finite and nonzero");
				if (!(r.f_end > 0.0))
					throw InvalidArgument(fmt::format("ramp end frequency must be positive (got {})", r.f_end));
				if (r.t_start < ramp_busy_until)
					throw InvalidArgument(fmt::format(
						"RoCoF ramp at t = {} overlaps the previous ramp ending at t = {}", r.t_start, ramp_busy_until));
				close_segment_at(r.t_start);
				GridSignal::FrequencySegment& seg = sig.mFrequency.back();
				const double f_now = seg.omega0 * f_nominal;
				const double duration = (r.f_end - f_now) / r.rate;
				if (duration < 0.0)
					throw InvalidArgument(fmt::format(
						"RoCoF rate {} Hz/s moves away from f_end = {} Hz (current {} Hz)", r.rate, r.f_end, f_now));
				if (duration == 0.0)
					return;
				seg.slope = r.rate / f_nominal;
				ramp_busy_until = r.t_start + duration;
				close_segment_at(ramp_busy_until);
				// Pin the hold value exactly to f_end.
				sig.mFrequency.back().omega0 = r.f_end / f_nominal;
				sig.mBreakpoints.push_back(r.t_start);
				sig.mBreakpoints.push_back(ramp_busy_until);
			},
			[&](const PhaseJump& j) {
				if (!std::isfinite(j.delta_theta))
					throw InvalidArgument("phase jump must be finite");
				sig.mJumps.push_back(j);
				sig.mBreakpoints.push_back(j.t);
			},
			[&](const VoltageDip& d) {
				if (!(d.duration > 0.0) || !std::isfinite(d.duration))
					throw InvalidArgument(fmt::format("dip duration must be positive (got {})", d.duration));
				if (!(d.v_dip >= 0.0) || !std::isfinite(d.v_dip))
					throw InvalidArgument(fmt::format("dip voltage must be non-negative (got {})", d.v_dip));
				const double t1 = d.t_start + d.duration;
				if (!sig.mDips.empty() && d.t_start < sig.mDips.back().t1)
					throw InvalidArgument(fmt::format(
						"voltage dip at t = {} overlaps the dip ending at t = {}", d.t_start, sig.mDips.back().t1));
				sig.mDips.push_back({d.t_start, t1, d.v_dip});
				sig.mBreakpoints.push_back(d.t_start);
				sig.mBreakpoints.push_back(t1);
			},
			[&](const SetpointStep& s) {
				if (!std::isfinite(s.p_set))
					throw InvalidArgument("setpoint must be finite");
				sig.mSetpoints.push_back(s);
				sig.mBreakpoints.push_back(s.t);
			}},
			ev);
	}

	std::sort(sig.mBreakpoints.begin(), sig.mBreakpoints.end());
	sig.mBreakpoints.erase(std::unique(sig.mBreakpoints.begin(), sig.mBreakpoints.end()), sig.mBreakpoints.end());
	sig.mEvents = std::move(events);
	return sig;
}

} // namespace gfcstab::scenario

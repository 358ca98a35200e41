#include <gfcstab/electrical.hpp>
#include <gfcstab/error.hpp>
#include <gfcstab/power_angle.hpp>
#include <gfcstab/simulator.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace gfcstab::simulator {

using scenario::GridSignal;
using scenario::Side;

void SimConfig::validate() const {
	if (!(t_end > 0.0) || !std::isfinite(t_end))
		throw InvalidArgument(fmt::format("t_end must be positive (got {})", t_end));
	if (!(dt > 0.0) || !std::isfinite(dt))
		throw InvalidArgument(fmt::format("dt must be positive (got {})", dt));
	if (record_every < 1)
		throw InvalidArgument(fmt::format("record_every must be >= 1 (got {})", record_every));
	if (!(los_threshold > 0.0))
		throw InvalidArgument(fmt::format("loss-of-sync threshold must be positive (got {})", los_threshold));
}

double find_equilibrium(double p_set, double vg, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode) {
	const power_angle::Curve curve = power_angle::feedback_curve(mode, gfc, net, vg);
	const power_angle::Peak peak = power_angle::curve_maximum(curve, power_angle::kinks(gfc, net, vg));
	return power_angle::rising_crossing(curve, p_set, peak);
}

bool LossOfSyncDetector::observe(double t, double delta, double delta_dot) {
	if (mVerdict.loss_of_sync)
		return false;
	const double excursion = delta - mRef;
	if (std::abs(excursion) > mThreshold && excursion * delta_dot > 0.0) {
		mVerdict = {true, t};
		return true;
	}
	return false;
}

control::ControllerGains simulation_gains(const GfcParams& gfc, const NetworkParams& net) {
	const double p_max = gfc.e_mag * net.vg_nominal / total_reactance(gfc, net);
	return control::derive_gains(gfc.h_inertia, gfc.r_droop, gfc.zeta, net.omega_base(), p_max);
}

namespace {

struct State {
	double theta = 0.0; // converter angle relative to the nominal frame
	double x = 0.0;     // controller state

	State operator+(const State& o) const { return {theta + o.theta, x + o.x}; }
	State operator*(double k) const { return {theta * k, x * k}; }
};

class ClosedLoop {
public:
	ClosedLoop(const GridSignal& signal, const GfcParams& gfc, const NetworkParams& net)
		: mSignal(signal), mGfc(gfc), mNet(net), mGains(simulation_gains(gfc, net)),
		  mOmegaBase(net.omega_base()) {}

	struct Eval {
		State rate;
		double delta = 0.0;
		double delta_omega = 0.0; // rad/s
		double slip = 0.0;        // d delta / dt, rad/s
		scenario::GridSample grid;
	};

	Eval evaluate(double t, Side side, const State& s) const {
		Eval ev;
		ev.grid = mSignal.at(t, side);
		const double p_set = mSignal.setpoint(t, mGfc.p_set, side);
		ev.delta = s.theta - ev.grid.theta;
		const double p_fb = electrical::feedback_power(mGfc.feedback_mode, ev.delta, mGfc, mNet, ev.grid.vg);
		const control::Derivative d = control::continuous_derivative({s.x, 0.0}, mGains, p_set - p_fb);
		ev.delta_omega = d.delta_omega;
		ev.rate = {d.delta_omega, d.dx_dt};
		ev.slip = d.delta_omega - mOmegaBase * (ev.grid.omega_pu - 1.0);
		return ev;
	}

	/// Classic RK4 over [a, b]; stages at a use the right limit and the stage
	/// at b the left limit so a discontinuity at either end stays outside.
	State rk4(double a, double b, const State& s) const {
		const double h = b - a;
		const State k1 = evaluate(a, Side::Right, s).rate;
		const State k2 = evaluate(a + 0.5 * h, Side::Right, s + k1 * (0.5 * h)).rate;
		const State k3 = evaluate(a + 0.5 * h, Side::Right, s + k2 * (0.5 * h)).rate;
		const State k4 = evaluate(b, Side::Left, s + k3 * h).rate;
		return s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
	}

	const control::ControllerGains& gains() const { return mGains; }
	double omega_base() const { return mOmegaBase; }

private:
	const GridSignal& mSignal;
	const GfcParams& mGfc;
	const NetworkParams& mNet;
	control::ControllerGains mGains;
	double mOmegaBase;
};

/// Equilibrium (delta, x) for a grid frequency, voltage and setpoint.
std::pair<double, double> equilibrium_state(const control::ControllerGains& gains, double omega_base, double omega_pu,
                                            double vg, double p_set, const GfcParams& gfc, const NetworkParams& net) {
	const double dw = omega_base * (omega_pu - 1.0);
	const double e = control::steady_state_error(gains, dw);
	const double delta = find_equilibrium(p_set - e, vg, gfc, net, gfc.feedback_mode);
	return {delta, control::steady_state_x(gains, dw, e)};
}

void record(Trajectory& traj, double t, const ClosedLoop::Eval& ev, const GfcParams& gfc, const NetworkParams& net,
            double omega_base) {
	const electrical::OperatingPoint op = electrical::operating_point(ev.delta, gfc, net, ev.grid.vg);
	traj.t.push_back(t);
	traj.delta.push_back(ev.delta);
	traj.omega_vsc_pu.push_back(1.0 + ev.delta_omega / omega_base);
	traj.omega_g_pu.push_back(ev.grid.omega_pu);
	traj.p_pcc.push_back(op.p_pcc);
	traj.q_pcc.push_back(op.q_pcc);
	traj.p_virt.push_back(op.p_virt);
	traj.i_mag_actual.push_back(op.i_mag_actual);
	traj.kc_lim.push_back(op.kc_lim);
	traj.vg.push_back(ev.grid.vg);
	traj.limited.push_back(op.limited);
}

} // namespace

Trajectory run(const GridSignal& signal, const GfcParams& gfc, const NetworkParams& net, const SimConfig& config) {
	gfc.validate();
	net.validate();
	config.validate();

	const ClosedLoop loop(signal, gfc, net);
	const double omega_base = loop.omega_base();

	const scenario::GridSample g0 = signal.at(0.0, Side::Left);
	const double p_set0 = signal.setpoint(0.0, gfc.p_set, Side::Left);
	const auto [delta0, x0] = equilibrium_state(loop.gains(), omega_base, g0.omega_pu, g0.vg, p_set0, gfc, net);

	Trajectory traj;
	traj.delta0 = delta0;
	traj.delta_ref = delta0;
	{
		const scenario::GridSample gf = signal.final_sample();
		try {
			traj.delta_ref = equilibrium_state(loop.gains(), omega_base, gf.omega_pu, gf.vg,
			                                   signal.final_setpoint(gfc.p_set), gfc, net)
			                     .first;
		} catch (const Infeasible&) {
			// No post-event equilibrium; measure excursions from the start.
		}
	}
	LossOfSyncDetector detector(traj.delta_ref, config.los_threshold);

	const auto steps = static_cast<long long>(std::ceil(config.t_end / config.dt - 1e-9));
	const std::span<const double> breakpoints = signal.breakpoints();
	const double snap_tol = 1e-9 * config.dt;
	// Step boundaries that fall within roundoff of an event instant move onto it.
	auto snap = [&](double t) {
		auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), t - snap_tol);
		if (it != breakpoints.end() && std::abs(*it - t) <= snap_tol)
			return *it;
		return t;
	};

	const std::size_t expected = static_cast<std::size_t>(steps / config.record_every + 2);
	for (auto* v : {&traj.t, &traj.delta, &traj.omega_vsc_pu, &traj.omega_g_pu, &traj.p_pcc, &traj.q_pcc,
	                &traj.p_virt, &traj.i_mag_actual, &traj.kc_lim, &traj.vg})
		v->reserve(expected);

	State s{delta0 + g0.theta, x0};
	// The first sample shows the pre-event state even when an event sits at t = 0.
	record(traj, 0.0, loop.evaluate(0.0, Side::Left, s), gfc, net, omega_base);

	for (long long n = 0; n < steps; ++n) {
		const double t0 = snap(static_cast<double>(n) * config.dt);
		const double t1 = snap(std::min(static_cast<double>(n + 1) * config.dt, config.t_end));

		double a = t0;
		for (auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t0 + snap_tol);
		     it != breakpoints.end() && *it < t1 - snap_tol; ++it) {
			s = loop.rk4(a, *it, s);
			a = *it;
		}
		s = loop.rk4(a, t1, s);

		const ClosedLoop::Eval ev = loop.evaluate(t1, Side::Right, s);
		if (!std::isfinite(s.theta) || !std::isfinite(s.x) || !std::isfinite(ev.delta_omega))
			throw NumericalError(fmt::format("non-finite state at t = {} s (theta = {}, x = {})", t1, s.theta, s.x));

		const bool lost = detector.observe(t1, ev.delta, ev.slip);
		const bool last = n + 1 == steps;
		if ((n + 1) % config.record_every == 0 || last || lost)
			record(traj, t1, ev, gfc, net, omega_base);
		if (lost && config.stop_on_loss)
			break;
	}
	traj.verdict = detector.verdict();
	return traj;
}

Verdict detect_loss_of_sync(const Trajectory& traj, double delta_ref, double threshold) {
	LossOfSyncDetector detector(delta_ref, threshold);
	const std::size_t n = traj.size();
	for (std::size_t k = 0; k < n; ++k) {
		double slope = 0.0;
		if (k > 0)
			slope = (traj.delta[k] - traj.delta[k - 1]) / (traj.t[k] - traj.t[k - 1]);
		else if (n > 1)
			slope = (traj.delta[1] - traj.delta[0]) / (traj.t[1] - traj.t[0]);
		if (detector.observe(traj.t[k], traj.delta[k], slope))
			break;
	}
	return detector.verdict();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
	os << "t_s,delta_deg,omega_vsc_pu,omega_g_pu,p_pcc_pu,q_pcc_pu,p_virt_pu,i_mag_pu,kc_lim,vg_pu,limited\n";
	for (std::size_t k = 0; k < traj.size(); ++k)
		os << fmt::format("{:.6f},{:.9g},{:.12g},{:.12g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.6g},{}\n", traj.t[k],
		                  rad_to_deg(traj.delta[k]), traj.omega_vsc_pu[k], traj.omega_g_pu[k], traj.p_pcc[k],
		                  traj.q_pcc[k], traj.p_virt[k], traj.i_mag_actual[k], traj.kc_lim[k], traj.vg[k],
		                  traj.limited[k] ? 1 : 0);
}

} // namespace gfcstab::simulator

#include <gfcstab/electrical.hpp>
#include <gfcstab/error.hpp>

#include <cmath>
#include <complex>
#include <ostream>

#include <fmt/format.h>

namespace gfcstab::electrical {

DqVector unsaturated_current(double e_mag, DqVector v_pcc, double r_v, double x_v) {
	if (r_v == 0.0 && x_v == 0.0)
		throw InvalidArgument("virtual impedance must be nonzero");
	const std::complex<double> drop{e_mag - v_pcc.d, -v_pcc.q};
	const std::complex<double> i = drop / std::complex<double>{r_v, x_v};
	return {i.real(), i.imag()};
}

LimitedCurrent apply_current_limit(DqVector i_ref, double i_lim) {
	if (!(i_lim > 0.0))
		throw InvalidArgument(fmt::format("current limit must be positive (got {})", i_lim));
	const double mag = magnitude(i_ref);
	if (mag <= i_lim)
		return {i_ref, 1.0};
	const double kc = mag / i_lim;
	return {i_ref / kc, kc};
}

PowerFlow measured_power(double delta, double e, double vg, double x_total, double i_lim) {
	const double mv = chord_length(e, vg, delta);
	const double p_num = e * vg * std::sin(delta);
	const double q_num = e * e - e * vg * std::cos(delta);
	// Unsaturated branch first: at mv = 0 the current is zero and the limited
	// expression would be 0/0.
	if (mv / x_total <= i_lim)
		return {p_num / x_total, q_num / x_total, false};
	return {p_num / mv * i_lim, q_num / mv * i_lim, true};
}

std::optional<double> limiter_activation_angle(double e, double vg, double x_total, double i_lim) {
	const double chord = i_lim * x_total;
	const double c = (e * e + vg * vg - chord * chord) / (2.0 * e * vg);
	if (c >= 1.0)
		return 0.0;
	if (c <= -1.0)
		return std::nullopt;
	return std::acos(c);
}

VirtualPower virtual_power(double delta, double e, double vg, double x_v, double x_ext, double i_lim) {
	const double x_sum = x_v + x_ext;
	const double mv = chord_length(e, vg, delta);
	const double p_num = e * vg * std::sin(delta);
	const double q_num = e * e - e * vg * std::cos(delta);
	if (mv / x_sum <= i_lim)
		return {p_num / x_sum, q_num / x_sum, 1.0, false};

	const double kc = (mv / i_lim - x_ext) / x_v;
	if (kc < 1.0 - 1e-12)
		throw NumericalError(fmt::format(
			"inconsistent limiter state at delta = {}: saturated but kc_lim = {}", delta, kc));
	const double x_eq = x_v + x_ext / kc;
	return {p_num / x_eq, q_num / x_eq, kc, true};
}

double virtual_power_closed_form(double delta, double e, double vg, double x_v, double x_ext, double i_lim) {
	const double mv = chord_length(e, vg, delta);
	const double p_num = e * vg * std::sin(delta);
	if (mv / (x_v + x_ext) <= i_lim)
		return p_num / (x_v + x_ext);
	return p_num * (1.0 - x_ext * i_lim / mv) / x_v;
}

Impedance internal_impedance(double kc_lim, double r_v, double x_v) {
	if (kc_lim < 1.0)
		throw InvalidArgument(fmt::format("kc_lim must be >= 1 (got {})", kc_lim));
	return {kc_lim * r_v, kc_lim * x_v};
}

OperatingPoint operating_point(double delta, const GfcParams& gfc, const NetworkParams& net, double vg) {
	const double x_total = total_reactance(gfc, net);
	const PowerFlow meas = measured_power(delta, gfc.e_mag, vg, x_total, gfc.i_lim);
	const VirtualPower virt = virtual_power(delta, gfc.e_mag, vg, gfc.x_v, net.x_ext(), gfc.i_lim);

	OperatingPoint op;
	op.delta = delta;
	op.p_pcc = meas.p;
	op.q_pcc = meas.q;
	op.p_virt = virt.p;
	op.limited = meas.limited;
	op.kc_lim = virt.kc_lim;
	if (meas.limited) {
		op.i_mag_unsat = virt.kc_lim * gfc.i_lim;
		op.i_mag_actual = gfc.i_lim;
	} else {
		op.i_mag_unsat = chord_length(gfc.e_mag, vg, delta) / x_total;
		op.i_mag_actual = op.i_mag_unsat;
	}
	return op;
}

double feedback_power(FeedbackMode mode, double delta, const GfcParams& gfc, const NetworkParams& net, double vg) {
	if (mode == FeedbackMode::Virtual)
		return virtual_power(delta, gfc.e_mag, vg, gfc.x_v, net.x_ext(), gfc.i_lim).p;
	return measured_power(delta, gfc.e_mag, vg, total_reactance(gfc, net), gfc.i_lim).p;
}

PowerAngleCurve sweep_curves(const GfcParams& gfc, const NetworkParams& net, double vg, int n_points) {
	if (n_points < 2)
		throw InvalidArgument(fmt::format("need at least 2 curve points (got {})", n_points));
	const double x_total = total_reactance(gfc, net);

	PowerAngleCurve curve;
	curve.deltas.reserve(n_points);
	curve.p_unlimited.reserve(n_points);
	curve.p_limited.reserve(n_points);
	curve.p_virtual.reserve(n_points);
	for (int k = 0; k < n_points; ++k) {
		const double delta = k == n_points - 1 ? pi : pi * k / (n_points - 1);
		curve.deltas.push_back(delta);
		curve.p_unlimited.push_back(gfc.e_mag * vg * std::sin(delta) / x_total);
		curve.p_limited.push_back(measured_power(delta, gfc.e_mag, vg, x_total, gfc.i_lim).p);
		curve.p_virtual.push_back(virtual_power(delta, gfc.e_mag, vg, gfc.x_v, net.x_ext(), gfc.i_lim).p);
	}
	curve.activation_delta = limiter_activation_angle(gfc.e_mag, vg, x_total, gfc.i_lim);
	return curve;
}

void write_curve_csv(std::ostream& os, const PowerAngleCurve& curve) {
	os << "delta_deg,p_unlimited_pu,p_limited_pu,p_virtual_pu\n";
	for (std::size_t k = 0; k < curve.deltas.size(); ++k)
		os << fmt::format("{:.6f},{:.12g},{:.12g},{:.12g}\n", rad_to_deg(curve.deltas[k]),
		                  curve.p_unlimited[k], curve.p_limited[k], curve.p_virtual[k]);
}

} // namespace gfcstab::electrical

#pragma once

#include <gfcstab/types.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

namespace gfcstab::electrical {

/// Current reference of the virtual admittance, (E - v_pcc) / (r_v + j x_v),
/// with E on the d-axis of the converter frame.
DqVector unsaturated_current(double e_mag, DqVector v_pcc, double r_v, double x_v);

struct LimitedCurrent {
	DqVector current;
	double kc_lim = 1.0; // >= 1; 1 when the reference is inside the circle
};

/// Circular limiter: scales the reference onto the circle of radius i_lim
/// when it lies outside, keeping its angle.
LimitedCurrent apply_current_limit(DqVector i_ref, double i_lim);

struct PowerFlow {
	double p = 0.0;
	double q = 0.0;
	bool limited = false;
};

/// Quasi-static power at the internal voltage with the measured (saturated)
/// current. Below the limit this is the classic E Vg sin(delta) / X_T; in the
/// limit the current magnitude is pinned to i_lim and x_total drops out.
PowerFlow measured_power(double delta, double e, double vg, double x_total, double i_lim);

/// Smallest delta in (0, pi] at which the limiter engages. Returns 0 when the
/// limiter is already active at delta = 0 and nullopt when the current never
/// exceeds i_lim.
std::optional<double> limiter_activation_angle(double e, double vg, double x_total, double i_lim);

struct VirtualPower {
	double p = 0.0;
	double q = 0.0;
	double kc_lim = 1.0;
	bool limited = false;
};

/// Power computed from the unsaturated current reference. Under the limit,
/// dividing the current by kc_lim acts like dividing the grid-side reactance
/// x_ext by kc_lim, so p = E Vg sin(delta) / (x_v + x_ext / kc_lim).
VirtualPower virtual_power(double delta, double e, double vg, double x_v, double x_ext, double i_lim);

/// Same quantity written without kc_lim:
/// E Vg sin(delta) (1 - x_ext i_lim / M_v) / x_v in the limited region.
double virtual_power_closed_form(double delta, double e, double vg, double x_v, double x_ext, double i_lim);

struct Impedance {
	double r = 0.0;
	double x = 0.0;
};

/// Apparent internal impedance of the current-limited converter.
Impedance internal_impedance(double kc_lim, double r_v, double x_v);

/// Everything the algebraic layer knows at one rotor angle.
struct OperatingPoint {
	double delta = 0.0;
	double p_pcc = 0.0;
	double q_pcc = 0.0;  // reactive power at the internal voltage terminal
	double p_virt = 0.0;
	double i_mag_unsat = 0.0;
	double i_mag_actual = 0.0;
	double kc_lim = 1.0;
	bool limited = false;
};

OperatingPoint operating_point(double delta, const GfcParams& gfc, const NetworkParams& net, double vg);

/// The power the synchronization loop sees for the given feedback mode.
double feedback_power(FeedbackMode mode, double delta, const GfcParams& gfc, const NetworkParams& net, double vg);

struct PowerAngleCurve {
	std::vector<double> deltas; // rad, uniform on [0, pi]
	std::vector<double> p_unlimited;
	std::vector<double> p_limited;
	std::vector<double> p_virtual;
	std::optional<double> activation_delta;
};

PowerAngleCurve sweep_curves(const GfcParams& gfc, const NetworkParams& net, double vg, int n_points);

/// CSV: delta_deg,p_unlimited_pu,p_limited_pu,p_virtual_pu
void write_curve_csv(std::ostream& os, const PowerAngleCurve& curve);

} // namespace gfcstab::electrical

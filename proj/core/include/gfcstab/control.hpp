#pragma once

namespace gfcstab::control {

/// Gains of the lead-lag power controller
///
///     dw_vsc = (k_pp s + k_ip) / (s + k_gp) * (P_set - P_fb)
///
/// The output dw_vsc is a frequency deviation in rad/s: k_ip = w_B / 2H turns
/// a pu power error into an angular acceleration, exactly as the swing
/// equation 2H d(w/w_B)/dt = dP does.
struct ControllerGains {
	double k_pp = 0.0;
	double k_ip = 0.0;
	double k_gp = 0.0;
	double k_droop = 0.0; // 1/R_d, 0 without droop
};

/// Gains from inertia constant h [s], droop r_droop [pu] (0 = none), damping
/// coefficient zeta, base angular frequency and the unlimited peak power
/// transfer p_max [pu]. Throws InvalidArgument when the droop is too large for
/// the requested damping (k_pp would turn negative).
ControllerGains derive_gains(double h, double r_droop, double zeta, double omega_base, double p_max);

/// Single-state realization: dx/dt = -k_gp x + (k_ip - k_pp k_gp) e,
/// dw = x + k_pp e.
struct ControllerState {
	double x = 0.0;
	double last_error = 0.0; // used by the sampled (trapezoidal) path only
};

struct Derivative {
	double dx_dt = 0.0;
	double delta_omega = 0.0; // rad/s
};

Derivative continuous_derivative(const ControllerState& state, const ControllerGains& gains, double error);

struct Step {
	ControllerState state;
	double delta_omega = 0.0; // rad/s
};

/// One sample of the Tustin-discretized controller. The state's last_error is
/// the error of the previous sample.
Step trapezoidal_step(const ControllerState& state, const ControllerGains& gains, double error, double t_s);

/// Internal state that holds the output at delta_omega with the given
/// constant error (k_gp = 0 admits any pairing; the error is then ignored).
double steady_state_x(const ControllerGains& gains, double delta_omega, double error);

/// Power error that sustains a constant frequency deviation (rad/s). Zero
/// for a pure PI controller.
double steady_state_error(const ControllerGains& gains, double delta_omega);

} // namespace gfcstab::control

#include <gfcstab/control.hpp>
#include <gfcstab/error.hpp>

#include <cmath>

#include <fmt/format.h>

namespace gfcstab::control {

ControllerGains derive_gains(double h, double r_droop, double zeta, double omega_base, double p_max) {
	if (!(h > 0.0))
		throw InvalidArgument(fmt::format("inertia constant must be positive (got {})", h));
	if (!(p_max > 0.0))
		throw InvalidArgument(fmt::format("p_max must be positive (got {})", p_max));
	if (r_droop < 0.0)
		throw InvalidArgument(fmt::format("droop must be non-negative (got {})", r_droop));
	if (!(omega_base > 0.0))
		throw InvalidArgument(fmt::format("base frequency must be positive (got {})", omega_base));

	ControllerGains g;
	g.k_droop = r_droop > 0.0 ? 1.0 / r_droop : 0.0;
	g.k_ip = omega_base / (2.0 * h);
	g.k_gp = g.k_droop / (2.0 * h);
	g.k_pp = zeta * std::sqrt(2.0 * omega_base / (p_max * h)) - g.k_droop / (2.0 * h * p_max);
	if (g.k_pp < 0.0)
		throw InvalidArgument(fmt::format(
			"droop R_d = {} is too strong for damping zeta = {}: k_pp = {} < 0", r_droop, zeta, g.k_pp));
	return g;
}

Derivative continuous_derivative(const ControllerState& state, const ControllerGains& gains, double error) {
	return {-gains.k_gp * state.x + (gains.k_ip - gains.k_pp * gains.k_gp) * error,
	        state.x + gains.k_pp * error};
}

Step trapezoidal_step(const ControllerState& state, const ControllerGains& gains, double error, double t_s) {
	if (!(t_s > 0.0))
		throw InvalidArgument(fmt::format("sampling time must be positive (got {})", t_s));
	const double a = gains.k_gp;
	const double b = gains.k_ip - gains.k_pp * gains.k_gp;
	const double half = 0.5 * t_s;
	const double x = ((1.0 - a * half) * state.x + b * half * (error + state.last_error)) / (1.0 + a * half);
	return {{x, error}, x + gains.k_pp * error};
}

double steady_state_x(const ControllerGains& gains, double delta_omega, double error) {
	return delta_omega - gains.k_pp * error;
}

double steady_state_error(const ControllerGains& gains, double delta_omega) {
	// dx/dt = 0 and dw = x + k_pp e give dw * k_gp = k_ip * e.
	return delta_omega * gains.k_gp / gains.k_ip;
}

} // namespace gfcstab::control

#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

namespace gfcstab {

inline constexpr double pi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

/// Base quantities for the per-unit system. Voltages are peak phase values,
/// so the 3/2 factor of peak-value power formulas cancels in pu.
struct PerUnitBase {
	double s_base = 100e6;    // VA
	double v_base = 10043.03; // V, peak phase of 12.3 kV line rms
	double f_base = 50.0;     // Hz

	double omega_base() const { return 2.0 * pi * f_base; }
	double i_base() const { return 2.0 * s_base / (3.0 * v_base); }
	double z_base() const { return v_base / i_base(); }

	void validate() const;

	double power_to_pu(double watts) const { return watts / s_base; }
	double power_to_si(double pu) const { return pu * s_base; }
	double voltage_to_pu(double volts) const { return volts / v_base; }
	double voltage_to_si(double pu) const { return pu * v_base; }
	double current_to_pu(double amps) const { return amps / i_base(); }
	double current_to_si(double pu) const { return pu * i_base(); }
	double impedance_to_pu(double ohms) const { return ohms / z_base(); }
	double impedance_to_si(double pu) const { return pu * z_base(); }
	double frequency_to_pu(double hz) const { return hz / f_base; }
	double frequency_to_si(double pu) const { return pu * f_base; }
};

/// Vector in the converter's synchronously rotating dq frame, per unit.
struct DqVector {
	double d = 0.0;
	double q = 0.0;

	friend DqVector operator+(DqVector a, DqVector b) { return {a.d + b.d, a.q + b.q}; }
	friend DqVector operator-(DqVector a, DqVector b) { return {a.d - b.d, a.q - b.q}; }
	friend DqVector operator*(DqVector a, double k) { return {a.d * k, a.q * k}; }
	friend DqVector operator*(double k, DqVector a) { return a * k; }
	friend DqVector operator/(DqVector a, double k) { return {a.d / k, a.q / k}; }
	friend bool operator==(DqVector, DqVector) = default;
};

inline double magnitude(DqVector v) { return std::hypot(v.d, v.q); }

/// Length of the chord between two voltage phasors of magnitude e and vg
/// separated by delta.
inline double chord_length(double e, double vg, double delta) {
	// Clamp guards tiny negative results of cancellation near delta = 0.
	double sq = vg * vg + e * e - 2.0 * vg * e * std::cos(delta);
	return std::sqrt(sq > 0.0 ? sq : 0.0);
}

enum class FeedbackMode { Measured, Virtual };

std::string_view to_string(FeedbackMode mode);
FeedbackMode parse_feedback_mode(std::string_view text);

/// Converter control and limiter settings. Gains are derived from these by
/// control::derive_gains.
struct GfcParams {
	double h_inertia = 10.0;   // s
	double zeta = 0.4;
	double r_droop = 0.0;      // pu, 0 disables droop
	double r_v = 0.03;         // pu
	double x_v = 0.3;          // pu
	double i_lim = 1.1;        // pu peak
	double e_mag = 1.0;        // pu
	double p_set = 0.8;        // pu
	FeedbackMode feedback_mode = FeedbackMode::Measured;

	void validate() const;
};

/// Grid-side reactances and the infinite bus.
struct NetworkParams {
	double x_tf = 0.1;          // pu
	double x_g = 0.1;           // pu
	double vg_nominal = 1.0;    // pu
	double f_nominal = 50.0;    // Hz

	/// Reactance between the PCC and the infinite bus.
	double x_ext() const { return x_tf + x_g; }
	double omega_base() const { return 2.0 * pi * f_nominal; }

	void validate() const;
};

/// Total reactance between the internal voltage and the infinite bus.
inline double total_reactance(const GfcParams& gfc, const NetworkParams& net) {
	return gfc.x_v + net.x_ext();
}

} // namespace gfcstab

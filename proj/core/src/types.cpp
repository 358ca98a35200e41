#include <gfcstab/error.hpp>
#include <gfcstab/types.hpp>

#include <fmt/format.h>

namespace gfcstab {

namespace {

void require(bool ok, const char* what, double value) {
	if (!ok)
		throw InvalidArgument(fmt::format("{} (got {})", what, value));
}

} // namespace

void PerUnitBase::validate() const {
	require(std::isfinite(s_base) && s_base > 0.0, "s_base must be positive", s_base);
	require(std::isfinite(v_base) && v_base > 0.0, "v_base must be positive", v_base);
	require(std::isfinite(f_base) && f_base > 0.0, "f_base must be positive", f_base);
}

std::string_view to_string(FeedbackMode mode) {
	switch (mode) {
	case FeedbackMode::Measured: return "measured";
	case FeedbackMode::Virtual: return "virtual";
	}
	return "unknown";
}

FeedbackMode parse_feedback_mode(std::string_view text) {
	if (text == "measured")
		return FeedbackMode::Measured;
	if (text == "virtual")
		return FeedbackMode::Virtual;
	throw InvalidArgument(fmt::format("unknown feedback mode '{}' (expected measured|virtual)", text));
}

void GfcParams::validate() const {
	require(std::isfinite(h_inertia) && h_inertia > 0.0, "inertia constant H must be positive", h_inertia);
	require(std::isfinite(zeta) && zeta >= 0.0, "damping coefficient must be non-negative", zeta);
	require(std::isfinite(r_droop) && r_droop >= 0.0, "droop must be non-negative", r_droop);
	require(std::isfinite(r_v) && r_v >= 0.0, "virtual resistance must be non-negative", r_v);
	require(std::isfinite(x_v) && x_v > 0.0, "virtual reactance must be positive", x_v);
	require(std::isfinite(i_lim) && i_lim > 0.0, "current limit must be positive", i_lim);
	require(std::isfinite(e_mag) && e_mag > 0.0, "internal voltage must be positive", e_mag);
	require(std::isfinite(p_set), "power setpoint must be finite", p_set);
	if (r_v > 0.0)
		require(x_v / r_v >= 1.0, "virtual impedance must be predominantly inductive (x_v/r_v >= 1)", x_v / r_v);
}

void NetworkParams::validate() const {
	require(std::isfinite(x_tf) && x_tf >= 0.0, "transformer reactance must be non-negative", x_tf);
	require(std::isfinite(x_g) && x_g >= 0.0, "grid reactance must be non-negative", x_g);
	require(x_ext() > 0.0, "external reactance x_tf + x_g must be positive", x_ext());
	require(std::isfinite(vg_nominal) && vg_nominal > 0.0, "grid voltage must be positive", vg_nominal);
	require(std::isfinite(f_nominal) && f_nominal > 0.0, "nominal frequency must be positive", f_nominal);
}

} // namespace gfcstab

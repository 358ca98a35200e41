#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace gfcstab::scenario {

/// Grid frequency ramps linearly from its current value to f_end at `rate`
/// (Hz/s, signed) and then holds.
struct RocofRamp {
	double t_start = 0.0;
	double rate = 0.0;
	double f_end = 0.0;
};

/// Grid phase advances by delta_theta [rad] at t. A positive jump reduces
/// delta = theta_vsc - theta_g, which is the direction that stresses the
/// synchronization loop.
struct PhaseJump {
	double t = 0.0;
	double delta_theta = 0.0;
};

/// Infinite-bus voltage drops to v_dip [pu] on [t_start, t_start + duration).
struct VoltageDip {
	double t_start = 0.0;
	double duration = 0.0;
	double v_dip = 0.0;
};

/// Active power setpoint changes to p_set at t.
struct SetpointStep {
	double t = 0.0;
	double p_set = 0.0;
};

using Event = std::variant<RocofRamp, PhaseJump, VoltageDip, SetpointStep>;

double event_time(const Event& event);

/// Which one-sided limit to take at a discontinuity.
enum class Side { Left, Right };

struct GridSample {
	double vg = 1.0;       // pu
	double omega_pu = 1.0; // pu
	double theta = 0.0;    // rad, relative to the nominal rotating frame
};

/// Infinite-bus voltage, frequency and phase as closed-form functions of
/// time. Values are right-continuous unless Side::Left is requested.
class GridSignal {
public:
	GridSample at(double t, Side side = Side::Right) const;

	/// Setpoint in force at t, or `fallback` before the first step.
	double setpoint(double t, double fallback, Side side = Side::Right) const;

	/// Sorted, unique instants where any signal has a kink or jump.
	std::span<const double> breakpoints() const { return mBreakpoints; }

	double f_nominal() const { return mFNominal; }
	double vg_nominal() const { return mVgNominal; }
	double omega_base() const;

	/// Value that every signal holds after the last event.
	GridSample final_sample() const;
	double final_setpoint(double fallback) const;

	const std::vector<Event>& events() const { return mEvents; }

private:
	friend GridSignal build_signal(std::vector<Event> events, double f_nominal, double vg_nominal);

	// Frequency segment starting at t0; the last one extends to infinity.
	struct FrequencySegment {
		double t0;
		double omega0;  // pu
		double slope;   // pu/s
		double theta0;  // integral of w_B (w - 1) up to t0, excluding jumps
	};
	struct Dip {
		double t0;
		double t1;
		double v;
	};

	double smooth_phase(double t) const;

	double mFNominal = 50.0;
	double mVgNominal = 1.0;
	std::vector<Event> mEvents;
	std::vector<FrequencySegment> mFrequency;
	std::vector<PhaseJump> mJumps;
	std::vector<Dip> mDips;
	std::vector<SetpointStep> mSetpoints;
	std::vector<double> mBreakpoints;
};

/// Builds the signal. Events are sorted by time; throws InvalidArgument on
/// negative times, non-positive durations, overlapping dips or ramps, and
/// ramps whose rate points away from f_end.
GridSignal build_signal(std::vector<Event> events, double f_nominal, double vg_nominal = 1.0);

} // namespace gfcstab::scenario

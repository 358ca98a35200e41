#pragma once

#include <gfcstab/types.hpp>

#include <functional>
#include <optional>

namespace gfcstab::power_angle {

using Curve = std::function<double(double)>;

/// Composite curve seen by the synchronization loop for a feedback mode.
Curve feedback_curve(FeedbackMode mode, const GfcParams& gfc, const NetworkParams& net, double vg);

/// Angles where the composite curve has a kink (limiter onset).
std::vector<double> kinks(const GfcParams& gfc, const NetworkParams& net, double vg);

struct Peak {
	double delta = 0.0;
	double p = 0.0;
};

/// Maximum of the curve on [0, pi]. Dense sampling, refined with Brent's
/// method, plus the supplied kink candidates.
Peak curve_maximum(const Curve& curve, const std::vector<double>& kink_candidates = {});

/// Plain bisection for f(lo) and f(hi) of opposite sign (or zero). Stops when
/// the bracket no longer shrinks.
double bisect(const std::function<double(double)>& f, double lo, double hi);

/// Smallest delta >= 0 with curve(delta) = p (rising branch). Throws
/// Infeasible with the curve maximum if p exceeds it. Negative p uses the odd
/// symmetry of the curve.
double rising_crossing(const Curve& curve, double p, const Peak& peak);

/// First delta beyond the peak where the curve falls to p; nullopt when it
/// never does on (peak, pi].
std::optional<double> falling_crossing(const Curve& curve, double p, const Peak& peak);

} // namespace gfcstab::power_angle

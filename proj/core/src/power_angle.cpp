#include <gfcstab/electrical.hpp>
#include <gfcstab/error.hpp>
#include <gfcstab/power_angle.hpp>

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace gfcstab::power_angle {

namespace {

constexpr int kSamples = 4096;

double sample_delta(int k) { return k == kSamples ? pi : pi * k / kSamples; }

} // namespace

Curve feedback_curve(FeedbackMode mode, const GfcParams& gfc, const NetworkParams& net, double vg) {
	return [mode, gfc, net, vg](double delta) { return electrical::feedback_power(mode, delta, gfc, net, vg); };
}

std::vector<double> kinks(const GfcParams& gfc, const NetworkParams& net, double vg) {
	std::vector<double> out;
	if (auto a = electrical::limiter_activation_angle(gfc.e_mag, vg, total_reactance(gfc, net), gfc.i_lim))
		out.push_back(*a);
	return out;
}

Peak curve_maximum(const Curve& curve, const std::vector<double>& kink_candidates) {
	int best = 0;
	double best_p = curve(0.0);
	for (int k = 1; k <= kSamples; ++k) {
		const double p = curve(sample_delta(k));
		if (p > best_p) {
			best_p = p;
			best = k;
		}
	}
	Peak peak{sample_delta(best), best_p};

	const double lo = sample_delta(std::max(best - 1, 0));
	const double hi = sample_delta(std::min(best + 1, kSamples));
	const auto [x, neg] = boost::math::tools::brent_find_minima(
		[&](double d) { return -curve(d); }, lo, hi, std::numeric_limits<double>::digits / 2 + 4);
	if (-neg > peak.p)
		peak = {x, -neg};
	for (double d : kink_candidates) {
		if (d < 0.0 || d > pi)
			continue;
		const double p = curve(d);
		if (p > peak.p)
			peak = {d, p};
	}
	return peak;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
	double f_lo = f(lo);
	if (f_lo == 0.0)
		return lo;
	if (f(hi) == 0.0)
		return hi;
	for (int it = 0; it < 200; ++it) {
		const double mid = 0.5 * (lo + hi);
		if (mid <= lo || mid >= hi)
			break;
		const double f_mid = f(mid);
		if (f_mid == 0.0)
			return mid;
		if ((f_mid < 0.0) == (f_lo < 0.0)) {
			lo = mid;
			f_lo = f_mid;
		} else {
			hi = mid;
		}
	}
	return 0.5 * (lo + hi);
}

double rising_crossing(const Curve& curve, double p, const Peak& peak) {
	if (p == 0.0)
		return 0.0;
	if (p < 0.0) {
		const Curve mirrored = [&](double d) { return -curve(-d); };
		return -rising_crossing(mirrored, -p, curve_maximum(mirrored));
	}
	if (p > peak.p)
		throw Infeasible(fmt::format("setpoint {:.6g} pu exceeds the power-angle curve maximum {:.6g} pu", p, peak.p),
		                 p, peak.p);

	const auto g = [&](double d) { return curve(d) - p; };
	double prev = 0.0;
	for (int k = 1; k <= kSamples; ++k) {
		const double d = sample_delta(k);
		if (d >= peak.delta)
			return bisect(g, prev, peak.delta);
		if (g(d) >= 0.0)
			return bisect(g, prev, d);
		prev = d;
	}
	return bisect(g, prev, peak.delta);
}

std::optional<double> falling_crossing(const Curve& curve, double p, const Peak& peak) {
	const auto g = [&](double d) { return curve(d) - p; };
	double prev = peak.delta;
	for (int k = 0; k <= kSamples; ++k) {
		const double d = sample_delta(k);
		if (d <= peak.delta)
			continue;
		if (g(d) <= 0.0)
			return bisect(g, prev, d);
		prev = d;
	}
	// sin(pi) is not exactly zero in floating point.
	if (p <= 0.0 && std::abs(curve(pi)) < 1e-12)
		return pi;
	return std::nullopt;
}

} // namespace gfcstab::power_angle

#pragma once

#include <gfcstab/power_angle.hpp>
#include <gfcstab/types.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

namespace gfcstab::analysis {

struct Equilibria {
	double stable = 0.0;
	std::optional<double> unstable;
};

/// Crossings of p_set with the composite curve of the mode at grid voltage vg.
Equilibria find_equilibria(double p_set, const GfcParams& gfc, const NetworkParams& net, double vg, FeedbackMode mode);

/// Knobs of the simulation-based searches. Every probe starts from the
/// pre-event equilibrium, applies its event at event_time and runs until the
/// event is over plus settle_time.
struct SearchOptions {
	double event_time = 0.5;                  // s
	double settle_time = 8.0;                 // s
	double dt = 1e-3;                         // s
	double jump_resolution = deg_to_rad(0.1); // rad
	double jump_ceiling = pi;                 // rad
	double rocof_resolution = 0.01;           // Hz/s
	double rocof_ceiling = 10.0;              // Hz/s
	double rocof_delta_f = -2.0;              // Hz, ramp end minus nominal
	double cct_resolution = 1e-3;             // s
	double cct_ceiling = 2.0;                 // s
};

/// Outcome of a bisection over simulated events. `value` is the largest
/// probed stable setting. at_ceiling: even the search ceiling was stable.
/// at_floor: even the smallest setting lost synchronism.
struct SearchResult {
	double value = 0.0;
	bool at_ceiling = false;
	bool at_floor = false;
};

/// Geometric phase-jump margin: distance from the stable to the unstable
/// equilibrium. Independent of inertia and damping.
double static_phase_jump_margin(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode);

/// Largest jump (either direction) that the simulated loop survives.
SearchResult dynamic_phase_jump_margin(double p_set, const GfcParams& gfc, const NetworkParams& net,
                                       FeedbackMode mode, const SearchOptions& opts = {});

double max_phase_jump(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                      bool use_simulation, const SearchOptions& opts = {});

/// Extra output power the virtual rotor must deliver to follow a grid
/// frequency ramp, plus the droop share at a settled deviation delta_f_pu.
/// rocof in Hz/s (negative for falling frequency).
double deceleration_power(double h, double f_nominal, double rocof, double r_droop = 0.0, double delta_f_pu = 0.0);

/// Largest |RoCoF| whose power demand fits under the composite curve maximum.
double static_max_rocof(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                        const SearchOptions& opts = {});

SearchResult dynamic_max_rocof(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                               const SearchOptions& opts = {});

struct RocofMargins {
	double static_limit = 0.0;
	SearchResult dynamic;
};

RocofMargins max_rocof(double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                       const SearchOptions& opts = {});

/// Longest dip to v_dip the loop survives, by bisection over simulations.
SearchResult critical_clearing_time(double p_set, double v_dip, const GfcParams& gfc, const NetworkParams& net,
                                    FeedbackMode mode, const SearchOptions& opts = {});

/// True when a single simulated event is survived. Exposed for tests.
bool survives_phase_jump(double jump, double p_set, const GfcParams& gfc, const NetworkParams& net,
                         FeedbackMode mode, const SearchOptions& opts = {});
bool survives_rocof(double rocof, double p_set, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                    const SearchOptions& opts = {});
bool survives_dip(double duration, double v_dip, double p_set, const GfcParams& gfc, const NetworkParams& net,
                  FeedbackMode mode, const SearchOptions& opts = {});

struct EqualArea {
	double a_acc = 0.0; // pu rad
	double a_dec = 0.0; // pu rad
	bool stable = true;
};

/// Accelerating area between p_set and the fault curve on [delta0, delta_clear]
/// against the decelerating area between the post-fault curve and p_set on
/// [delta_clear, delta_u_post]. `kinks` are split points for the quadrature.
/// Throws InvalidArgument when delta_clear lies outside [delta0, delta_u_post].
EqualArea equal_area(double p_set, const power_angle::Curve& fault_curve, const power_angle::Curve& post_curve,
                     double delta0, double delta_clear, double delta_u_post, const std::vector<double>& kinks = {});

/// Clearing angle at which both areas are equal. nullopt if clearing at
/// delta0 already fails; delta_u_post if the areas never balance before it.
std::optional<double> critical_clearing_angle(double p_set, const power_angle::Curve& fault_curve,
                                              const power_angle::Curve& post_curve, double delta0,
                                              double delta_u_post, const std::vector<double>& kinks = {});

/// Equal-area diagnostics for a dip to v_dip lasting `duration`, with the
/// clearing angle taken from the simulated fault-on trajectory.
struct DipEqualArea {
	EqualArea areas;
	double delta0 = 0.0;
	double delta_clear = 0.0;
	std::optional<double> delta_u_post;
};

DipEqualArea dip_equal_area(double p_set, double v_dip, double duration, const GfcParams& gfc,
                            const NetworkParams& net, FeedbackMode mode, const SearchOptions& opts = {});

/// Clearing time predicted by the equal-area criterion: the time at which the
/// simulated sustained-fault trajectory reaches the critical clearing angle.
/// Infinite when the sustained fault never drives delta that far.
double eac_clearing_time(double p_set, double v_dip, const GfcParams& gfc, const NetworkParams& net,
                         FeedbackMode mode, const SearchOptions& opts = {});

struct MarginRequest {
	double p_set = 0.8;
	double v_dip = 0.5;
	double eac_duration = 0.3; // s, dip used for the area diagnostics
};

struct MarginReport {
	FeedbackMode mode = FeedbackMode::Measured;
	double p_set = 0.0;
	double delta_margin_static = 0.0; // rad
	SearchResult delta_margin_dynamic;
	double rocof_max_static = 0.0;    // Hz/s
	SearchResult rocof_max_dynamic;
	SearchResult cct;                 // s
	DipEqualArea eac;
};

/// All margins for one feedback mode. The three simulation searches run
/// concurrently; each is a deterministic bisection.
MarginReport compute_margins(const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode,
                             const MarginRequest& request, const SearchOptions& opts = {});

void write_margin_table(std::ostream& os, const std::vector<MarginReport>& reports);

/// CSV: mode,margin,static,dynamic,unit,note
void write_margin_csv(std::ostream& os, const std::vector<MarginReport>& reports);

} // namespace gfcstab::analysis

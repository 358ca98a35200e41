#pragma once

#include <gfcstab/control.hpp>
#include <gfcstab/scenario.hpp>
#include <gfcstab/types.hpp>

#include <iosfwd>
#include <limits>
#include <vector>

namespace gfcstab::simulator {

struct SimConfig {
	double t_end = 10.0;             // s
	double dt = 1e-3;                // s, classic RK4
	int record_every = 1;
	double los_threshold = pi;       // rad beyond the reference equilibrium
	bool stop_on_loss = true;

	void validate() const;
};

struct Verdict {
	bool loss_of_sync = false;
	double t_loss = std::numeric_limits<double>::quiet_NaN();

	bool stable() const { return !loss_of_sync; }
	friend bool operator==(const Verdict& a, const Verdict& b) {
		return a.loss_of_sync == b.loss_of_sync && (!a.loss_of_sync || a.t_loss == b.t_loss);
	}
};

struct Trajectory {
	std::vector<double> t;
	std::vector<double> delta;        // rad, unwrapped
	std::vector<double> omega_vsc_pu;
	std::vector<double> omega_g_pu;
	std::vector<double> p_pcc;
	std::vector<double> q_pcc;
	std::vector<double> p_virt;
	std::vector<double> i_mag_actual;
	std::vector<double> kc_lim;
	std::vector<double> vg;
	std::vector<bool> limited;

	double delta0 = 0.0;     // initial equilibrium
	double delta_ref = 0.0;  // reference for the loss-of-sync test
	Verdict verdict;

	std::size_t size() const { return t.size(); }
};

/// Stable equilibrium angle for power p_set at grid voltage vg: the rising
/// branch crossing of the mode's composite curve. Throws Infeasible with the
/// curve maximum if p_set cannot be met.
double find_equilibrium(double p_set, double vg, const GfcParams& gfc, const NetworkParams& net, FeedbackMode mode);

/// Online pole-slip test: |delta - delta_ref| beyond the threshold while still
/// moving away from the reference.
class LossOfSyncDetector {
public:
	LossOfSyncDetector(double delta_ref, double threshold) : mRef(delta_ref), mThreshold(threshold) {}

	/// Returns true on the first sample that satisfies the criterion.
	bool observe(double t, double delta, double delta_dot);

	const Verdict& verdict() const { return mVerdict; }

private:
	double mRef;
	double mThreshold;
	Verdict mVerdict;
};

/// Integrates the closed loop (controller state plus virtual rotor angle) with
/// the algebraic electrical layer evaluated at every RK4 stage. Starts at the
/// equilibrium of the pre-event grid and setpoint. Throws NumericalError on a
/// non-finite state.
Trajectory run(const scenario::GridSignal& signal, const GfcParams& gfc, const NetworkParams& net,
               const SimConfig& config);

/// Offline version of the pole-slip test over recorded samples.
Verdict detect_loss_of_sync(const Trajectory& traj, double delta_ref, double threshold = pi);

/// Gains used by run(): derived against the unlimited peak power transfer.
control::ControllerGains simulation_gains(const GfcParams& gfc, const NetworkParams& net);

/// CSV: t_s,delta_deg,omega_vsc_pu,omega_g_pu,p_pcc_pu,q_pcc_pu,p_virt_pu,i_mag_pu,kc_lim,vg_pu,limited
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace gfcstab::simulator

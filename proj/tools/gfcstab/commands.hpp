#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gfcstab::commands {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
	kOk = 0,          // success; for simulate: the run stayed in synchronism
	kError = 1,       // bad input or failed numerics
	kLossOfSync = 2,  // simulate: loss of synchronism; reproduce-paper: verdict mismatch
};

/// Writes `content` to `path` through a temporary file and a rename, so a
/// reader never sees a partial file.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// Output path: the explicit one, else $GFCSTAB_OUT_DIR/<fallback>, else ./<fallback>.
std::filesystem::path resolve_output(const std::optional<std::filesystem::path>& explicit_path,
                                     const std::string& fallback_name);

int simulate(const config::ScenarioConfig& cfg, const std::filesystem::path& out, std::ostream& log);

int curve(const config::ScenarioConfig& cfg, const std::filesystem::path& out, int n_points, std::ostream& log);

/// Margins for both feedback modes at the configured setpoint. Prints the
/// table to `report` and, if given, writes the CSV.
int margin(const config::ScenarioConfig& cfg, const std::optional<std::filesystem::path>& csv_out,
           std::ostream& report);

/// One row of the reference outcome matrix.
struct VerdictRow {
	std::string event;
	FeedbackMode mode;
	bool expected_stable;
	bool observed_stable;
	double t_loss;

	bool matches() const { return expected_stable == observed_stable; }
};

/// The six reference events (RoCoF 1 Hz/s, 40 deg phase jump, 0.3 s dip to
/// 0.5 pu) for both feedback modes, with the expected outcomes.
std::vector<config::ScenarioConfig> reference_scenarios(std::vector<std::string>* names = nullptr,
                                                        std::vector<bool>* expected_stable = nullptr);

/// Runs the six reference events, writes their trajectories, curve families
/// for Vg = 1.0 and 0.5 pu, the margin table and verdicts.csv into out_dir.
int reproduce_paper(const std::filesystem::path& out_dir, std::ostream& log,
                    std::vector<VerdictRow>* rows = nullptr);

} // namespace gfcstab::commands

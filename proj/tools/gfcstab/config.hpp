#pragma once

#include <gfcstab/analysis.hpp>
#include <gfcstab/error.hpp>
#include <gfcstab/scenario.hpp>
#include <gfcstab/simulator.hpp>
#include <gfcstab/types.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gfcstab::config {

/// Parse failure carrying the source position.
class ParseError : public Error {
public:
	ParseError(const std::string& source, int line, const std::string& message);

	int line() const noexcept { return mLine; }

private:
	int mLine;
};

/// Settings of the margin searches as they appear in the [analysis] section.
struct AnalysisSettings {
	double v_dip = 0.5;                 // pu
	double eac_duration = 0.3;          // s
	double rocof_delta_f = -2.0;        // Hz
	double event_time = 0.5;            // s
	double settle_time = 8.0;           // s
	double jump_resolution_deg = 0.1;
	double rocof_resolution = 0.01;     // Hz/s
	double rocof_ceiling = 10.0;        // Hz/s
	double cct_resolution = 1e-3;       // s
	double cct_ceiling = 2.0;           // s

	friend bool operator==(const AnalysisSettings&, const AnalysisSettings&) = default;
};

/// A scenario file. Defaults reproduce the reference parameter set: X_T = 0.5
/// pu including x_v = 0.3, E = Vg = 1, I_lim = 1.1, zeta = 0.4, H = 10 s.
struct ScenarioConfig {
	GfcParams gfc;
	NetworkParams network;
	std::vector<scenario::Event> events;
	double t_end = 10.0;
	double dt = 1e-3;
	int record_every = 1;
	double los_threshold_deg = 180.0;
	AnalysisSettings analysis;

	simulator::SimConfig sim_config() const;
	analysis::SearchOptions search_options() const;
	scenario::GridSignal signal() const;
	void validate() const;
};

bool same_parameters(const ScenarioConfig& a, const ScenarioConfig& b);

ScenarioConfig parse(std::istream& in, const std::string& source_name = "<config>");
ScenarioConfig parse(std::string_view text, const std::string& source_name = "<config>");
ScenarioConfig load(const std::filesystem::path& path);

/// Writes a config that parses back to identical parameters.
std::string serialize(const ScenarioConfig& cfg);

/// Applies "section.key=value" or a bare "key=value" (keys are unique across
/// sections). "event=<event line>" appends an event and "events=none" clears
/// them.
void apply_override(ScenarioConfig& cfg, std::string_view assignment);

/// Event line syntax of the [events] section.
scenario::Event parse_event(std::string_view line);
std::string format_event(const scenario::Event& event);

} // namespace gfcstab::config

#include "commands.hpp"

#include <gfcstab/analysis.hpp>
#include <gfcstab/electrical.hpp>
#include <gfcstab/simulator.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace gfcstab::commands {

namespace fs = std::filesystem;

void write_atomically(const fs::path& path, const std::string& content) {
	if (path.has_parent_path())
		fs::create_directories(path.parent_path());
	fs::path tmp = path;
	tmp += ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out)
			throw Error(fmt::format("cannot write {}", tmp.string()));
		out << content;
		if (!out.flush())
			throw Error(fmt::format("write to {} failed", tmp.string()));
	}
	fs::rename(tmp, path);
}

fs::path resolve_output(const std::optional<fs::path>& explicit_path, const std::string& fallback_name) {
	if (explicit_path)
		return *explicit_path;
	if (const char* dir = std::getenv("GFCSTAB_OUT_DIR"); dir && *dir)
		return fs::path(dir) / fallback_name;
	return fs::path(fallback_name);
}

int simulate(const config::ScenarioConfig& cfg, const fs::path& out, std::ostream& log) {
	cfg.validate();
	const simulator::Trajectory traj = simulator::run(cfg.signal(), cfg.gfc, cfg.network, cfg.sim_config());
	std::ostringstream csv;
	simulator::write_trajectory_csv(csv, traj);
	write_atomically(out, csv.str());
	if (traj.verdict.stable()) {
		log << fmt::format("stable ({} mode), {} samples -> {}\n", to_string(cfg.gfc.feedback_mode), traj.size(),
		                   out.string());
		return kOk;
	}
	log << fmt::format("loss of synchronism at t = {:.3f} s ({} mode) -> {}\n", traj.verdict.t_loss,
	                   to_string(cfg.gfc.feedback_mode), out.string());
	return kLossOfSync;
}

int curve(const config::ScenarioConfig& cfg, const fs::path& out, int n_points, std::ostream& log) {
	cfg.gfc.validate();
	cfg.network.validate();
	const electrical::PowerAngleCurve c =
		electrical::sweep_curves(cfg.gfc, cfg.network, cfg.network.vg_nominal, n_points);
	std::ostringstream csv;
	electrical::write_curve_csv(csv, c);
	write_atomically(out, csv.str());
	if (c.activation_delta)
		log << fmt::format("limiter onset at {:.3f} deg, {} points -> {}\n", rad_to_deg(*c.activation_delta),
		                   n_points, out.string());
	else
		log << fmt::format("limiter never engages, {} points -> {}\n", n_points, out.string());
	return kOk;
}

namespace {

std::vector<analysis::MarginReport> margins_for(const config::ScenarioConfig& cfg, double p_set) {
	analysis::MarginRequest request;
	request.p_set = p_set;
	request.v_dip = cfg.analysis.v_dip;
	request.eac_duration = cfg.analysis.eac_duration;
	const analysis::SearchOptions opts = cfg.search_options();
	auto measured = std::async(std::launch::async, [&] {
		return analysis::compute_margins(cfg.gfc, cfg.network, FeedbackMode::Measured, request, opts);
	});
	analysis::MarginReport virt =
		analysis::compute_margins(cfg.gfc, cfg.network, FeedbackMode::Virtual, request, opts);
	return {measured.get(), virt};
}

} // namespace

int margin(const config::ScenarioConfig& cfg, const std::optional<fs::path>& csv_out, std::ostream& report) {
	cfg.validate();
	const std::vector<analysis::MarginReport> reports = margins_for(cfg, cfg.gfc.p_set);
	analysis::write_margin_table(report, reports);
	if (csv_out) {
		std::ostringstream csv;
		analysis::write_margin_csv(csv, reports);
		write_atomically(*csv_out, csv.str());
	}
	return kOk;
}

std::vector<config::ScenarioConfig> reference_scenarios(std::vector<std::string>* names,
                                                        std::vector<bool>* expected_stable) {
	struct Case {
		const char* name;
		double p_set;
		scenario::Event event;
	};
	const Case cases[] = {
		{"rocof_1hz_s", 0.8, scenario::RocofRamp{1.0, -1.0, 48.0}},
		{"phase_jump_40deg", 0.9, scenario::PhaseJump{1.0, deg_to_rad(40.0)}},
		{"voltage_dip_0.5pu_0.3s", 0.8, scenario::VoltageDip{1.0, 0.3, 0.5}},
	};
	std::vector<config::ScenarioConfig> out;
	for (const Case& c : cases) {
		for (FeedbackMode mode : {FeedbackMode::Measured, FeedbackMode::Virtual}) {
			config::ScenarioConfig cfg;
			cfg.gfc.p_set = c.p_set;
			cfg.gfc.feedback_mode = mode;
			cfg.events = {c.event};
			cfg.t_end = 10.0;
			out.push_back(cfg);
			if (names)
				names->push_back(c.name);
			if (expected_stable)
				expected_stable->push_back(mode == FeedbackMode::Virtual);
		}
	}
	return out;
}

int reproduce_paper(const fs::path& out_dir, std::ostream& log, std::vector<VerdictRow>* rows_out) {
	const auto started = std::chrono::steady_clock::now();
	fs::create_directories(out_dir);

	std::vector<std::string> names;
	std::vector<bool> expected;
	const std::vector<config::ScenarioConfig> scenarios = reference_scenarios(&names, &expected);

	std::vector<std::future<simulator::Trajectory>> runs;
	for (const config::ScenarioConfig& cfg : scenarios)
		runs.push_back(std::async(std::launch::async, [&cfg] {
			return simulator::run(cfg.signal(), cfg.gfc, cfg.network, cfg.sim_config());
		}));

	std::vector<VerdictRow> rows;
	std::string verdicts = "event,mode,expected,observed,t_loss_s,match\n";
	for (std::size_t k = 0; k < scenarios.size(); ++k) {
		const simulator::Trajectory traj = runs[k].get();
		const FeedbackMode mode = scenarios[k].gfc.feedback_mode;
		std::ostringstream csv;
		simulator::write_trajectory_csv(csv, traj);
		write_atomically(out_dir / fmt::format("trajectory_{}_{}.csv", names[k], to_string(mode)), csv.str());

		VerdictRow row{names[k], mode, expected[k], traj.verdict.stable(), traj.verdict.t_loss};
		const auto label = [](bool stable) { return stable ? "Stable" : "LossOfSync"; };
		verdicts += fmt::format("{},{},{},{},{},{}\n", row.event, to_string(mode), label(row.expected_stable),
		                        label(row.observed_stable),
		                        row.observed_stable ? std::string() : fmt::format("{:.3f}", row.t_loss),
		                        row.matches() ? "yes" : "NO");
		rows.push_back(row);
	}
	write_atomically(out_dir / "verdicts.csv", verdicts);

	const config::ScenarioConfig base;
	for (double vg : {1.0, 0.5}) {
		config::ScenarioConfig cfg = base;
		cfg.network.vg_nominal = vg;
		const electrical::PowerAngleCurve c = electrical::sweep_curves(cfg.gfc, cfg.network, vg, 721);
		std::ostringstream csv;
		electrical::write_curve_csv(csv, c);
		write_atomically(out_dir / fmt::format("curves_vg{:.2f}.csv", vg), csv.str());
	}

	std::vector<analysis::MarginReport> reports;
	for (double p_set : {0.8, 0.9})
		for (analysis::MarginReport& r : margins_for(base, p_set))
			reports.push_back(r);
	std::ostringstream table;
	std::ostringstream margin_csv;
	analysis::write_margin_table(table, reports);
	analysis::write_margin_csv(margin_csv, reports);
	write_atomically(out_dir / "margins.txt", table.str());
	write_atomically(out_dir / "margins.csv", margin_csv.str());

	int matched = 0;
	log << fmt::format("{:<24} {:<9} {:<11} {:<11} {}\n", "event", "mode", "expected", "observed", "match");
	for (const VerdictRow& r : rows) {
		matched += r.matches();
		log << fmt::format("{:<24} {:<9} {:<11} {:<11} {}\n", r.event, to_string(r.mode),
		                   r.expected_stable ? "Stable" : "LossOfSync", r.observed_stable ? "Stable" : "LossOfSync",
		                   r.matches() ? "yes" : "NO");
	}
	const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
	log << '\n' << table.str();
	log << fmt::format("\n{}/{} verdicts match, {:.1f} s, outputs in {}\n", matched, rows.size(), seconds,
	                   out_dir.string());
	for (const VerdictRow& r : rows)
		if (!r.matches())
			log << fmt::format("mismatch: {} / {}\n", r.event, to_string(r.mode));

	if (rows_out)
		*rows_out = rows;
	return matched == static_cast<int>(rows.size()) ? kOk : kLossOfSync;
}

} // namespace gfcstab::commands

#include "gfcstab/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

gfcstab::config::ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
	gfcstab::config::ScenarioConfig cfg = path.empty() ? gfcstab::config::ScenarioConfig{} : gfcstab::config::load(path);
	for (const std::string& o : overrides)
		gfcstab::config::apply_override(cfg, o);
	return cfg;
}

} // namespace

int main(int argc, char** argv) {
	namespace cmd = gfcstab::commands;
	CLI::App app{"Transient stability of a current-limited grid-forming converter on an infinite bus"};
	app.require_subcommand(1);

	std::string config_path;
	std::vector<std::string> overrides;
	std::string out_path;
	int points = 721;

	auto add_common = [&](CLI::App* sub) {
		sub->add_option("--config,-c", config_path, "Scenario config (INI); built-in defaults if omitted")
			->check(CLI::ExistingFile);
		sub->add_option("--override,-O", overrides, "Override a config key: [section.]key=value (repeatable)");
	};

	CLI::App* simulate = app.add_subcommand("simulate", "Run one scenario and write the trajectory CSV");
	add_common(simulate);
	simulate->add_option("--out,-o", out_path, "Trajectory CSV path");

	CLI::App* curve = app.add_subcommand("curve", "Write measured/virtual power-angle curves as CSV");
	add_common(curve);
	curve->add_option("--out,-o", out_path, "Curve CSV path");
	curve->add_option("--points,-n", points, "Samples on [0, 180] deg")->check(CLI::Range(2, 1000000));

	CLI::App* margin = app.add_subcommand("margin", "Stability margins for both feedback modes");
	add_common(margin);
	margin->add_option("--out,-o", out_path, "Also write the margin CSV here");

	CLI::App* reproduce = app.add_subcommand("reproduce-paper", "Run the reference event matrix and write all outputs");
	reproduce->add_option("--out,-o", out_path, "Output directory");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		// --help lands here too, with exit code 0.
		return app.exit(e) == 0 ? cmd::kOk : cmd::kError;
	}

	const auto explicit_out = out_path.empty() ? std::optional<std::filesystem::path>{}
	                                           : std::optional<std::filesystem::path>{out_path};
	try {
		if (simulate->parsed())
			return cmd::simulate(load_config(config_path, overrides), cmd::resolve_output(explicit_out, "trajectory.csv"),
			                     std::cout);
		if (curve->parsed())
			return cmd::curve(load_config(config_path, overrides), cmd::resolve_output(explicit_out, "curves.csv"),
			                  points, std::cout);
		if (margin->parsed())
			return cmd::margin(load_config(config_path, overrides), explicit_out, std::cout);
		if (reproduce->parsed())
			return cmd::reproduce_paper(cmd::resolve_output(explicit_out, "reproduction"), std::cout);
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return cmd::kError;
	}
	return cmd::kError;
}

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace gfcstab::config {

ParseError::ParseError(const std::string& source, int line, const std::string& message)
	: Error(line > 0 ? fmt::format("{}:{}: {}", source, line, message) : fmt::format("{}: {}", source, message)),
	  mLine(line) {}

namespace {

template <class... Ts>
struct overloaded : Ts... {
	using Ts::operator()...;
};

std::string_view trim(std::string_view s) {
	const auto first = s.find_first_not_of(" \t\r");
	if (first == std::string_view::npos)
		return {};
	const auto last = s.find_last_not_of(" \t\r");
	return s.substr(first, last - first + 1);
}

double to_double(std::string_view text, std::string_view key) {
	text = trim(text);
	if (!text.empty() && text.front() == '+')
		text.remove_prefix(1);
	double value = 0.0;
	const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
		throw InvalidArgument(fmt::format("'{}' is not a number for {}", text, key));
	return value;
}

int to_int(std::string_view text, std::string_view key) {
	text = trim(text);
	int value = 0;
	const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc{} || ptr != text.data() + text.size())
		throw InvalidArgument(fmt::format("'{}' is not an integer for {}", text, key));
	return value;
}

/// Decimal degrees that convert back to exactly this radian value.
std::string degrees_text(double rad) {
	double deg = rad_to_deg(rad);
	for (int step = 0; step < 16; ++step) {
		for (double dir : {1.0, -1.0}) {
			double candidate = deg;
			for (int k = 0; k < step; ++k)
				candidate = std::nextafter(candidate, dir * INFINITY);
			if (deg_to_rad(candidate) == rad)
				return fmt::format("{}", candidate);
		}
	}
	return fmt::format("{}", deg);
}

struct KeyDef {
	std::string_view section;
	std::string_view key;
	std::function<void(ScenarioConfig&, std::string_view)> set;
	std::function<std::string(const ScenarioConfig&)> get;
};

#define GFC_DOUBLE_KEY(SECTION, KEY, MEMBER)                                                                   \
	KeyDef {                                                                                                   \
		SECTION, KEY, [](ScenarioConfig& c, std::string_view v) { c.MEMBER = to_double(v, KEY); },            \
			[](const ScenarioConfig& c) { return fmt::format("{}", c.MEMBER); }                                \
	}

const std::vector<KeyDef>& key_table() {
	static const std::vector<KeyDef> table = {
		GFC_DOUBLE_KEY("gfc", "h_s", gfc.h_inertia),
		GFC_DOUBLE_KEY("gfc", "zeta", gfc.zeta),
		GFC_DOUBLE_KEY("gfc", "r_droop_pu", gfc.r_droop),
		GFC_DOUBLE_KEY("gfc", "r_v_pu", gfc.r_v),
		GFC_DOUBLE_KEY("gfc", "x_v_pu", gfc.x_v),
		GFC_DOUBLE_KEY("gfc", "i_lim_pu", gfc.i_lim),
		GFC_DOUBLE_KEY("gfc", "e_pu", gfc.e_mag),
		GFC_DOUBLE_KEY("gfc", "p_set_pu", gfc.p_set),
		KeyDef{"gfc", "feedback",
		       [](ScenarioConfig& c, std::string_view v) { c.gfc.feedback_mode = parse_feedback_mode(trim(v)); },
		       [](const ScenarioConfig& c) { return std::string(to_string(c.gfc.feedback_mode)); }},
		GFC_DOUBLE_KEY("network", "x_tf_pu", network.x_tf),
		GFC_DOUBLE_KEY("network", "x_g_pu", network.x_g),
		GFC_DOUBLE_KEY("network", "vg_pu", network.vg_nominal),
		GFC_DOUBLE_KEY("network", "f_nominal_hz", network.f_nominal),
		GFC_DOUBLE_KEY("sim", "t_end_s", t_end),
		GFC_DOUBLE_KEY("sim", "dt_s", dt),
		KeyDef{"sim", "record_every",
		       [](ScenarioConfig& c, std::string_view v) { c.record_every = to_int(v, "record_every"); },
		       [](const ScenarioConfig& c) { return fmt::format("{}", c.record_every); }},
		GFC_DOUBLE_KEY("sim", "los_threshold_deg", los_threshold_deg),
		GFC_DOUBLE_KEY("analysis", "v_dip_pu", analysis.v_dip),
		GFC_DOUBLE_KEY("analysis", "eac_duration_s", analysis.eac_duration),
		GFC_DOUBLE_KEY("analysis", "rocof_delta_f_hz", analysis.rocof_delta_f),
		GFC_DOUBLE_KEY("analysis", "event_time_s", analysis.event_time),
		GFC_DOUBLE_KEY("analysis", "settle_time_s", analysis.settle_time),
		GFC_DOUBLE_KEY("analysis", "jump_resolution_deg", analysis.jump_resolution_deg),
		GFC_DOUBLE_KEY("analysis", "rocof_resolution_hz_s", analysis.rocof_resolution),
		GFC_DOUBLE_KEY("analysis", "rocof_ceiling_hz_s", analysis.rocof_ceiling),
		GFC_DOUBLE_KEY("analysis", "cct_resolution_s", analysis.cct_resolution),
		GFC_DOUBLE_KEY("analysis", "cct_ceiling_s", analysis.cct_ceiling),
	};
	return table;
}

#undef GFC_DOUBLE_KEY

const KeyDef* find_key(std::string_view section, std::string_view key) {
	for (const KeyDef& def : key_table())
		if (def.section == section && def.key == key)
			return &def;
	return nullptr;
}

constexpr std::string_view kSections[] = {"gfc", "network", "events", "sim", "analysis"};

} // namespace

simulator::SimConfig ScenarioConfig::sim_config() const {
	simulator::SimConfig s;
	s.t_end = t_end;
	s.dt = dt;
	s.record_every = record_every;
	s.los_threshold = deg_to_rad(los_threshold_deg);
	return s;
}

analysis::SearchOptions ScenarioConfig::search_options() const {
	analysis::SearchOptions o;
	o.event_time = analysis.event_time;
	o.settle_time = analysis.settle_time;
	o.dt = dt;
	o.jump_resolution = deg_to_rad(analysis.jump_resolution_deg);
	o.rocof_resolution = analysis.rocof_resolution;
	o.rocof_ceiling = analysis.rocof_ceiling;
	o.rocof_delta_f = analysis.rocof_delta_f;
	o.cct_resolution = analysis.cct_resolution;
	o.cct_ceiling = analysis.cct_ceiling;
	return o;
}

scenario::GridSignal ScenarioConfig::signal() const {
	return scenario::build_signal(events, network.f_nominal, network.vg_nominal);
}

void ScenarioConfig::validate() const {
	gfc.validate();
	network.validate();
	sim_config().validate();
	(void)signal();
}

bool same_parameters(const ScenarioConfig& a, const ScenarioConfig& b) {
	// Compare through the serialized form of every key plus the event lines.
	for (const KeyDef& def : key_table())
		if (def.get(a) != def.get(b))
			return false;
	if (a.events.size() != b.events.size())
		return false;
	for (std::size_t k = 0; k < a.events.size(); ++k)
		if (format_event(a.events[k]) != format_event(b.events[k]))
			return false;
	return true;
}

scenario::Event parse_event(std::string_view line) {
	line = trim(line);
	const auto space = line.find_first_of(" \t");
	const std::string_view kind = line.substr(0, space);
	std::map<std::string, double, std::less<>> fields;
	std::string_view rest = space == std::string_view::npos ? std::string_view{} : line.substr(space);
	while (!(rest = trim(rest)).empty()) {
		const auto end = rest.find_first_of(" \t");
		const std::string_view token = rest.substr(0, end);
		rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
		const auto eq = token.find('=');
		if (eq == std::string_view::npos)
			throw InvalidArgument(fmt::format("expected key=value in event, got '{}'", token));
		const std::string key(token.substr(0, eq));
		if (fields.contains(key))
			throw InvalidArgument(fmt::format("duplicate field '{}' in event", key));
		fields.emplace(key, to_double(token.substr(eq + 1), key));
	}

	auto take = [&](std::initializer_list<std::string_view> names) {
		std::vector<double> values;
		for (std::string_view n : names) {
			auto it = fields.find(n);
			if (it == fields.end())
				throw InvalidArgument(fmt::format("event '{}' is missing field '{}'", kind, n));
			values.push_back(it->second);
			fields.erase(it);
		}
		if (!fields.empty())
			throw InvalidArgument(fmt::format("event '{}' has unknown field '{}'", kind, fields.begin()->first));
		return values;
	};

	if (kind == "rocof") {
		const auto v = take({"t", "rate", "f_end"});
		return scenario::RocofRamp{v[0], v[1], v[2]};
	}
	if (kind == "phase_jump") {
		const auto v = take({"t", "deg"});
		return scenario::PhaseJump{v[0], deg_to_rad(v[1])};
	}
	if (kind == "voltage_dip") {
		const auto v = take({"t", "dur", "v"});
		return scenario::VoltageDip{v[0], v[1], v[2]};
	}
	if (kind == "setpoint") {
		const auto v = take({"t", "p"});
		return scenario::SetpointStep{v[0], v[1]};
	}
	throw InvalidArgument(
		fmt::format("unknown event '{}' (expected rocof|phase_jump|voltage_dip|setpoint)", kind));
}

std::string format_event(const scenario::Event& event) {
	return std::visit(
		overloaded{
			[](const scenario::RocofRamp& e) {
				return fmt::format("rocof t={} rate={} f_end={}", e.t_start, e.rate, e.f_end);
			},
			[](const scenario::PhaseJump& e) {
				return fmt::format("phase_jump t={} deg={}", e.t, degrees_text(e.delta_theta));
			},
			[](const scenario::VoltageDip& e) {
				return fmt::format("voltage_dip t={} dur={} v={}", e.t_start, e.duration, e.v_dip);
			},
			[](const scenario::SetpointStep& e) { return fmt::format("setpoint t={} p={}", e.t, e.p_set); }},
		event);
}

ScenarioConfig parse(std::istream& in, const std::string& source_name) {
	ScenarioConfig cfg;
	std::string section;
	std::string raw;
	int line_no = 0;
	while (std::getline(in, raw)) {
		++line_no;
		std::string_view line = raw;
		if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
			line = line.substr(0, hash);
		line = trim(line);
		if (line.empty())
			continue;

		try {
			if (line.front() == '[') {
				if (line.back() != ']')
					throw InvalidArgument("unterminated section header");
				section = std::string(trim(line.substr(1, line.size() - 2)));
				if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections))
					throw InvalidArgument(fmt::format("unknown section [{}]", section));
				continue;
			}
			if (section.empty())
				throw InvalidArgument("entry before any section header");
			if (section == "events") {
				cfg.events.push_back(parse_event(line));
				continue;
			}
			const auto eq = line.find('=');
			if (eq == std::string_view::npos)
				throw InvalidArgument(fmt::format("expected key = value, got '{}'", line));
			const std::string_view key = trim(line.substr(0, eq));
			const KeyDef* def = find_key(section, key);
			if (!def)
				throw InvalidArgument(fmt::format("unknown key '{}' in [{}]", key, section));
			def->set(cfg, line.substr(eq + 1));
		} catch (const ParseError&) {
			throw;
		} catch (const Error& e) {
			throw ParseError(source_name, line_no, e.what());
		}
	}
	return cfg;
}

ScenarioConfig parse(std::string_view text, const std::string& source_name) {
	std::istringstream in{std::string(text)};
	return parse(in, source_name);
}

ScenarioConfig load(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in)
		throw ParseError(path.string(), 0, "cannot open config file");
	return parse(in, path.string());
}

std::string serialize(const ScenarioConfig& cfg) {
	std::string out;
	std::string_view current;
	for (const KeyDef& def : key_table()) {
		if (def.section != current) {
			if (!current.empty())
				out += '\n';
			// Events go between [network] and [sim], in the order of a run.
			if (def.section == "sim") {
				out += "[events]\n";
				for (const auto& ev : cfg.events)
					out += format_event(ev) + '\n';
				out += '\n';
			}
			current = def.section;
			out += fmt::format("[{}]\n", current);
		}
		out += fmt::format("{} = {}\n", def.key, def.get(cfg));
	}
	return out;
}

void apply_override(ScenarioConfig& cfg, std::string_view assignment) {
	const auto eq = assignment.find('=');
	if (eq == std::string_view::npos)
		throw InvalidArgument(fmt::format("override '{}' is not key=value", assignment));
	std::string_view key = trim(assignment.substr(0, eq));
	const std::string_view value = trim(assignment.substr(eq + 1));

	if (key == "event" || key == "events.event") {
		cfg.events.push_back(parse_event(value));
		return;
	}
	if (key == "events") {
		if (value != "none")
			throw InvalidArgument("only 'events=none' is supported; use 'event=<line>' to add events");
		cfg.events.clear();
		return;
	}

	std::string_view section;
	if (const auto dot = key.find('.'); dot != std::string_view::npos) {
		section = key.substr(0, dot);
		key = key.substr(dot + 1);
	}
	const KeyDef* match = nullptr;
	for (const KeyDef& def : key_table()) {
		if (def.key == key && (section.empty() || def.section == section)) {
			if (match)
				throw InvalidArgument(fmt::format("override key '{}' is ambiguous; qualify it with a section", key));
			match = &def;
		}
	}
	if (!match)
		throw InvalidArgument(fmt::format("unknown override key '{}'", assignment.substr(0, eq)));
	match->set(cfg, value);
}

} // namespace gfcstab::config

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dfp/security.hpp"
#include "dfp/sim/scenario.hpp"

namespace dfp::sim {

/// (dotted field path, value) pairs applied on top of a config file,
/// e.g. {"schedule.c0", "50"} or {"population.1.p_online", "0.9"}.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses the YAML scenario format. Unknown keys, missing required keys and
/// malformed values throw ProtocolError(Configuration) whose message starts
/// with the offending field path. Overrides are applied before parsing.
ScenarioConfig parse_scenario(std::string_view yaml_text, const ConfigOverrides& overrides = {});

ScenarioConfig load_scenario(const std::string& path, const ConfigOverrides& overrides = {});

/// Security model inputs from YAML with keys p_fraud, p_detect_given_fraud,
/// p_window, n_nodes, p_node_challenge and p_participation (all optional,
/// defaulting to `base`).
SecurityParams parse_security_params(std::string_view yaml_text, SecurityParams base = {});

/// Sets one SecurityParams field by name. Throws Configuration for unknown
/// names or unparsable values.
void set_security_field(SecurityParams& params, const std::string& name, const std::string& value);

/// Renders a config back to the YAML format accepted by parse_scenario.
std::string to_yaml(const ScenarioConfig& config);

} // namespace dfp::sim

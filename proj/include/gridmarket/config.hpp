#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridmarket/engine.hpp"

namespace gridmarket {

/// A configuration that fails to parse or validate. The message names the key.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// "one-cat" ... "six-cat".
const std::vector<std::string>& presetNames();

/// Scenario preset for 1..6 categories with linear ratios. Pool sizes are the
/// full-scale ones; `deskScale` divides them at world construction.
ScenarioConfig presetConfig(std::size_t categories, int deskScale = 10);
ScenarioConfig presetConfig(std::string_view name, int deskScale = 10);

/// Sum over categories of (hi / 2) * r_i: the processing capacity per provider
/// used to balance presets of different category counts.
double nominalCapacity(const ScenarioConfig& cfg);

/// Sets one `section.key` from its text form. Throws ConfigError on unknown
/// keys or malformed values; does not run whole-config validation.
void applySetting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// All keys with their text values, in the canonical order.
std::vector<std::pair<std::string, std::string>> configEntries(const ScenarioConfig& cfg);

std::string writeConfig(const ScenarioConfig& cfg);
ScenarioConfig parseConfigText(std::string_view text);

/// A preset name or a path to a config file; the result is validated.
ScenarioConfig parseConfig(const std::string& presetOrPath);

}  // namespace gridmarket

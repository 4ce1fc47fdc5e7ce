#include "gridmarket/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "format.hpp"

namespace gridmarket {

using detail::formatNumber;
using detail::parseNumber;
using detail::trim;

namespace {

// Per-provider CPU ranges for 1..6 categories. The three- and six-category
// rows are the published ones; the others follow the same capacity balance.
const std::vector<std::vector<IntRange>> kPresetCapacity = {
    {{1, 90}},
    {{1, 45}, {1, 22}},
    {{1, 30}, {1, 15}, {1, 10}},
    {{1, 22}, {1, 11}, {1, 8}, {1, 6}},
    {{1, 18}, {1, 9}, {1, 6}, {1, 5}, {1, 4}},
    {{1, 12}, {1, 7}, {1, 5}, {1, 4}, {1, 3}, {1, 3}},
};

[[noreturn]] void fail(std::string_view key, const std::string& what) {
    throw ConfigError(std::string(key) + ": " + what);
}

template <typename T>
T number(std::string_view key, std::string_view value) {
    T out{};
    if (!parseNumber(trim(value), out)) fail(key, "expected a number, got '" + std::string(value) + "'");
    return out;
}

template <typename T>
Range<T> range(std::string_view key, std::string_view value) {
    value = trim(value);
    const auto sep = value.find("..");
    if (sep == std::string_view::npos) {
        const T v = number<T>(key, value);
        return {v, v};
    }
    return {number<T>(key, value.substr(0, sep)), number<T>(key, value.substr(sep + 2))};
}

template <typename T>
std::string rangeText(const Range<T>& r) {
    if constexpr (std::is_floating_point_v<T>) {
        return formatNumber(r.lo) + ".." + formatNumber(r.hi);
    } else {
        return std::to_string(r.lo) + ".." + std::to_string(r.hi);
    }
}

std::vector<double> list(std::string_view key, std::string_view value) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto item = value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(number<double>(key, item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct Setting {
    std::function<void(ScenarioConfig&, std::string_view key, std::string_view value)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
Setting numeric(T ScenarioConfig::*member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.*member = number<T>(k, v); },
            [member](const ScenarioConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return formatNumber(c.*member);
                else return std::to_string(c.*member);
            }};
}

template <typename T>
Setting ranged(Range<T> ScenarioConfig::*member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.*member = range<T>(k, v); },
            [member](const ScenarioConfig& c) { return rangeText(c.*member); }};
}

Setting churnRate(double ChurnRates::*member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.churn.*member = number<double>(k, v); },
            [member](const ScenarioConfig& c) { return formatNumber(c.churn.*member); }};
}

template <typename T>
Setting solverField(T SolverConfig::*member) {
    return {[member](ScenarioConfig& c, std::string_view k, std::string_view v) { c.solver.*member = number<T>(k, v); },
            [member](const ScenarioConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return formatNumber(c.solver.*member);
                else return std::to_string(c.solver.*member);
            }};
}

// Fixed keys in canonical order; capacity.cpuN keys are handled separately.
const std::vector<std::pair<std::string, Setting>>& fixedFields() {
    static const std::vector<std::pair<std::string, Setting>> fields = {
        {"scenario.name",
         {[](ScenarioConfig& c, std::string_view, std::string_view v) { c.name = std::string(trim(v)); },
          [](const ScenarioConfig& c) { return c.name; }}},
        {"scenario.ratios",
         {[](ScenarioConfig& c, std::string_view k, std::string_view v) { c.ratios = list(k, v); },
          [](const ScenarioConfig& c) {
              std::string s;
              for (std::size_t i = 0; i < c.ratios.size(); ++i) s += (i ? "," : "") + formatNumber(c.ratios[i]);
              return s;
          }}},
        {"scenario.steps", numeric(&ScenarioConfig::totalSteps)},
        {"scenario.seed", numeric(&ScenarioConfig::seed)},
        {"pools.activeConsumers", numeric(&ScenarioConfig::activeConsumers)},
        {"pools.potentialConsumers", numeric(&ScenarioConfig::potentialConsumers)},
        {"pools.activeProviders", numeric(&ScenarioConfig::activeProviders)},
        {"pools.potentialProviders", numeric(&ScenarioConfig::potentialProviders)},
        {"pools.deskScale", numeric(&ScenarioConfig::deskScale)},
        {"churn.consumerActive", churnRate(&ChurnRates::consumerActive)},
        {"churn.consumerPotential", churnRate(&ChurnRates::consumerPotential)},
        {"churn.providerActive", churnRate(&ChurnRates::providerActive)},
        {"churn.providerPotential", churnRate(&ChurnRates::providerPotential)},
        {"jobs.length", ranged(&ScenarioConfig::jobLength)},
        {"jobs.injectionPeriod", numeric(&ScenarioConfig::injectionPeriod)},
        {"jobs.batchSize", ranged(&ScenarioConfig::injectionBatch)},
        {"jobs.backgroundProbability", numeric(&ScenarioConfig::backgroundProbability)},
        {"budget.initial", ranged(&ScenarioConfig::initialBudget)},
        {"budget.allowancePeriod", numeric(&ScenarioConfig::allowancePeriod)},
        {"budget.replenishFactor", numeric(&ScenarioConfig::replenishFactor)},
        {"valuation.range", ranged(&ScenarioConfig::valuation)},
        {"provider.mprWindow", numeric(&ScenarioConfig::mprWindow)},
        {"solver.normThreshold", solverField(&SolverConfig::normThreshold)},
        {"solver.maxControllerIterations", solverField(&SolverConfig::maxControllerIterations)},
        {"solver.minImprovement", solverField(&SolverConfig::minImprovement)},
        {"solver.priceMin", solverField(&SolverConfig::priceMin)},
        {"solver.priceMax", solverField(&SolverConfig::priceMax)},
        {"solver.newtonMaxSteps", solverField(&SolverConfig::newtonMaxSteps)},
        {"solver.fdRelStep", solverField(&SolverConfig::fdRelStep)},
        {"solver.fdMinStep", solverField(&SolverConfig::fdMinStep)},
        {"solver.damping", solverField(&SolverConfig::damping)},
        {"solver.maxHalvings", solverField(&SolverConfig::maxHalvings)},
        {"solver.successTolerance", solverField(&SolverConfig::successTolerance)},
        {"solver.patternInitialMesh", solverField(&SolverConfig::patternInitialMesh)},
        {"solver.patternShrink", solverField(&SolverConfig::patternShrink)},
        {"solver.patternExpand", solverField(&SolverConfig::patternExpand)},
        {"solver.patternMinMesh", solverField(&SolverConfig::patternMinMesh)},
        {"solver.patternMaxEvals", solverField(&SolverConfig::patternMaxEvals)},
        {"solver.patternPlateauExpansions", solverField(&SolverConfig::patternPlateauExpansions)},
    };
    return fields;
}

void validateOrThrow(const ScenarioConfig& cfg) {
    try {
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

const std::vector<std::string>& presetNames() {
    static const std::vector<std::string> names = {"one-cat", "two-cat", "three-cat", "four-cat", "five-cat", "six-cat"};
    return names;
}

ScenarioConfig presetConfig(std::size_t categories, int deskScale) {
    if (categories < 1 || categories > kPresetCapacity.size()) {
        throw ConfigError("preset: category count must be 1..6, got " + std::to_string(categories));
    }
    ScenarioConfig cfg;
    cfg.name = presetNames()[categories - 1];
    cfg.ratios.clear();
    for (std::size_t i = 1; i <= categories; ++i) cfg.ratios.push_back(static_cast<double>(i));
    cfg.cpusPerProvider = kPresetCapacity[categories - 1];
    cfg.deskScale = deskScale;
    validateOrThrow(cfg);
    return cfg;
}

ScenarioConfig presetConfig(std::string_view name, int deskScale) {
    const auto& names = presetNames();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return presetConfig(i + 1, deskScale);
    }
    throw ConfigError("preset: unknown preset '" + std::string(name) + "'");
}

double nominalCapacity(const ScenarioConfig& cfg) {
    double total = 0.0;
    for (std::size_t i = 0; i < cfg.ratios.size() && i < cfg.cpusPerProvider.size(); ++i) {
        total += cfg.cpusPerProvider[i].hi / 2.0 * cfg.ratios[i];
    }
    return total;
}

void applySetting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    constexpr std::string_view capacityPrefix = "capacity.cpu";
    if (key.substr(0, capacityPrefix.size()) == capacityPrefix) {
        std::size_t index = 0;
        if (!parseNumber(key.substr(capacityPrefix.size()), index) || index < 1 || index > 64) {
            fail(key, "unknown key");
        }
        if (cfg.cpusPerProvider.size() < index) cfg.cpusPerProvider.resize(index, IntRange{1, 1});
        cfg.cpusPerProvider[index - 1] = range<int>(key, value);
        return;
    }
    for (const auto& [name, field] : fixedFields()) {
        if (name == key) {
            field.set(cfg, key, value);
            return;
        }
    }
    fail(key, "unknown key");
}

std::vector<std::pair<std::string, std::string>> configEntries(const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, field] : fixedFields()) {
        out.emplace_back(name, field.get(cfg));
    }
    for (std::size_t i = 0; i < cfg.cpusPerProvider.size(); ++i) {
        out.emplace_back("capacity.cpu" + std::to_string(i + 1), rangeText(cfg.cpusPerProvider[i]));
    }
    return out;
}

std::string writeConfig(const ScenarioConfig& cfg) {
    std::ostringstream os;
    std::string section;
    for (const auto& [key, value] : configEntries(cfg)) {
        const std::string sec = key.substr(0, key.find('.'));
        if (sec != section) {
            if (!section.empty()) os << '\n';
            os << "# " << sec << '\n';
            section = sec;
        }
        os << key << " = " << value << '\n';
    }
    return os.str();
}

ScenarioConfig parseConfigText(std::string_view text) {
    ScenarioConfig cfg;
    bool capacitySeen = false;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++lineNo;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineNo) + ": expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        if (key.starts_with("capacity.") && !capacitySeen) {
            // A file that lists capacities lists all of them.
            cfg.cpusPerProvider.clear();
            capacitySeen = true;
        }
        try {
            applySetting(cfg, key, line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    validateOrThrow(cfg);
    return cfg;
}

ScenarioConfig parseConfig(const std::string& presetOrPath) {
    for (const auto& name : presetNames()) {
        if (name == presetOrPath) return presetConfig(std::string_view(name));
    }
    std::ifstream in(presetOrPath, std::ios::binary);
    if (!in) throw ConfigError(presetOrPath + ": no such preset or readable config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parseConfigText(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(presetOrPath + ": " + e.what());
    }
}

}  // namespace gridmarket

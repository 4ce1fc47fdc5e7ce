// gridmarket command line front end. Talks to the simulator only through the
// C interface in gridmarket.h.
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridmarket/gridmarket.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct ConfigDeleter {
    void operator()(gm_config* c) const { gm_config_free(c); }
};
struct RunDeleter {
    void operator()(gm_run* r) const { gm_run_free(r); }
};
struct SweepDeleter {
    void operator()(gm_sweep* s) const { gm_sweep_free(s); }
};
using ConfigPtr = std::unique_ptr<gm_config, ConfigDeleter>;
using RunPtr = std::unique_ptr<gm_run, RunDeleter>;
using SweepPtr = std::unique_ptr<gm_sweep, SweepDeleter>;

int report(gm_status status) {
    std::cerr << "error: " << gm_last_error() << '\n';
    return (status == GM_ERR_CONFIG || status == GM_ERR_INVALID_ARGUMENT) ? kExitValidation : kExitRuntime;
}

// "1..6" or "1,3,5".
std::optional<std::vector<std::size_t>> parsePresetList(const std::string& text) {
    std::vector<std::size_t> out;
    try {
        if (auto dots = text.find(".."); dots != std::string::npos) {
            std::size_t used = 0;
            const auto lo = std::stoul(text.substr(0, dots), &used);
            if (used != dots) return std::nullopt;
            const std::string rest = text.substr(dots + 2);
            const auto hi = std::stoul(rest, &used);
            if (used != rest.size() || hi < lo) return std::nullopt;
            for (auto n = lo; n <= hi; ++n) out.push_back(n);
        } else {
            std::size_t start = 0;
            while (start <= text.size()) {
                const auto comma = text.find(',', start);
                const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                std::size_t used = 0;
                out.push_back(std::stoul(item, &used));
                if (used != item.size()) return std::nullopt;
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
        }
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return out;
}

struct SimulateArgs {
    std::string preset;
    std::string configPath;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<int> deskScale;
    bool fullScale = false;
    bool noTiming = false;
    std::string out;
};

struct SweepArgs {
    std::string presets;
    int seeds = 3;
    std::uint64_t seed = 1;
    int steps = 150;
    int deskScale = 10;
    bool fullScale = false;
    bool noTiming = false;
    std::string out;
};

int runSimulate(const SimulateArgs& a) {
    const int scale = a.fullScale ? 1 : a.deskScale.value_or(10);
    gm_config* raw = nullptr;
    gm_status st = a.preset.empty() ? gm_config_load(a.configPath.c_str(), &raw)
                                    : gm_config_preset(a.preset.c_str(), scale, &raw);
    if (st != GM_OK) return report(st);
    ConfigPtr cfg(raw);

    auto set = [&](const char* key, const std::string& value) { return gm_config_set(cfg.get(), key, value.c_str()); };
    if (!a.preset.empty() || a.deskScale || a.fullScale) {
        if ((st = set("pools.deskScale", std::to_string(scale))) != GM_OK) return report(st);
    }
    if (a.seed && (st = set("scenario.seed", std::to_string(*a.seed))) != GM_OK) return report(st);
    if (a.steps && (st = set("scenario.steps", std::to_string(*a.steps))) != GM_OK) return report(st);

    gm_run* runRaw = nullptr;
    if ((st = gm_simulate(cfg.get(), a.noTiming ? 0 : 1, &runRaw)) != GM_OK) return report(st);
    RunPtr run(runRaw);
    if ((st = gm_run_emit_reports(run.get(), a.out.c_str())) != GM_OK) return report(st);

    const std::size_t steps = gm_run_step_count(run.get());
    std::cout << "steps: " << steps << "  categories: " << gm_run_category_count(run.get()) << "  out: " << a.out
              << '\n';
    if (steps > 0) {
        for (std::size_t k = 0; k < gm_run_category_count(run.get()); ++k) {
            double price = 0.0;
            double util = 0.0;
            gm_run_price(run.get(), steps - 1, k, &price);
            gm_run_utilization(run.get(), steps - 1, k, &util);
            std::cout << "  CPU" << k + 1 << "  final price " << price << "  utilization " << util << '\n';
        }
    }
    return 0;
}

int runSweep(const SweepArgs& a) {
    const auto presets = parsePresetList(a.presets);
    if (!presets) {
        std::cerr << "error: --presets expects lo..hi or a comma list, got '" << a.presets << "'\n";
        return kExitValidation;
    }
    gm_sweep* raw = nullptr;
    const gm_status st = gm_sweep_run(presets->data(), presets->size(), a.seeds, a.seed, a.steps,
                                      a.fullScale ? 1 : a.deskScale, a.noTiming ? 0 : 1, a.out.c_str(), &raw);
    if (st != GM_OK) return report(st);
    SweepPtr sweep(raw);
    std::cout << "categories  meanQueries  meanMillis  failures\n";
    for (std::size_t i = 0; i < gm_sweep_row_count(sweep.get()); ++i) {
        std::size_t n = 0;
        double q = 0.0;
        double ms = 0.0;
        int failures = 0;
        gm_sweep_row(sweep.get(), i, &n, &q, &ms, &failures);
        std::cout << "  " << n << "  " << q << "  " << ms << "  " << failures << '\n';
    }
    for (std::size_t i = 0; i < gm_sweep_error_count(sweep.get()); ++i) {
        std::cerr << "warning: " << gm_sweep_error(sweep.get(), i) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-time CPU spot market simulator"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario and write reports");
    auto* presetOpt = simulate->add_option("--preset", sim.preset, "Preset name: one-cat .. six-cat");
    auto* configOpt = simulate->add_option("--config", sim.configPath, "Scenario config file (key = value lines)");
    presetOpt->excludes(configOpt);
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--steps", sim.steps, "Number of steps")->check(CLI::NonNegativeNumber);
    auto* deskOpt = simulate->add_option("--desk-scale", sim.deskScale, "Divide pool sizes by k (default 10)")
                        ->check(CLI::PositiveNumber);
    simulate->add_flag("--full-scale", sim.fullScale, "Full pool sizes (same as --desk-scale 1)")->excludes(deskOpt);
    simulate->add_flag("--no-timing", sim.noTiming, "Write zero runtimes so output is byte-reproducible");
    simulate->add_option("--out", sim.out, "Output directory")->required();

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Run presets across seeds and compare solver cost");
    sweep->add_option("--presets", sw.presets, "Category counts, e.g. 1..6 or 1,2,3")->required();
    sweep->add_option("--seeds", sw.seeds, "Seeds per preset")->capture_default_str();
    sweep->add_option("--seed", sw.seed, "First seed")->capture_default_str();
    sweep->add_option("--steps", sw.steps, "Steps per run")->capture_default_str();
    auto* sweepDesk = sweep->add_option("--desk-scale", sw.deskScale, "Divide pool sizes by k")
                          ->capture_default_str()
                          ->check(CLI::PositiveNumber);
    sweep->add_flag("--full-scale", sw.fullScale, "Full pool sizes")->excludes(sweepDesk);
    sweep->add_flag("--no-timing", sw.noTiming, "Write zero runtimes");
    sweep->add_option("--out", sw.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    if (simulate->parsed()) {
        if (sim.preset.empty() && sim.configPath.empty()) {
            std::cerr << "error: simulate needs --preset or --config\n";
            return kExitValidation;
        }
        return runSimulate(sim);
    }
    return runSweep(sw);
}

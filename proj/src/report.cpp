#include "gridmarket/report.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "format.hpp"
#include "gridmarket/config.hpp"
#include "gridmarket/svg.hpp"

namespace gridmarket {

namespace fs = std::filesystem;
using detail::formatNumber;

namespace {

// Tracks what one emit call created so a failure can roll it back.
class OutputTransaction {
public:
    explicit OutputTransaction(fs::path root) : root_(std::move(root)) {
        std::error_code ec;
        const bool existed = fs::exists(root_, ec);
        if (!existed) {
            fs::create_directories(root_, ec);
            if (ec) throw ReportError(root_.string() + ": cannot create directory: " + ec.message());
            createdRoot_ = true;
        } else if (!fs::is_directory(root_, ec)) {
            throw ReportError(root_.string() + ": exists and is not a directory");
        }
    }

    OutputTransaction(const OutputTransaction&) = delete;
    OutputTransaction& operator=(const OutputTransaction&) = delete;

    ~OutputTransaction() {
        if (committed_) return;
        std::error_code ec;
        if (createdRoot_) {
            fs::remove_all(root_, ec);
            return;
        }
        for (const auto& f : written_) fs::remove(root_ / f, ec);
        for (const auto& d : createdDirs_) fs::remove(root_ / d, ec);
    }

    void write(const fs::path& relative, const std::string& content) {
        const fs::path full = root_ / relative;
        if (relative.has_parent_path() && !fs::exists(full.parent_path())) {
            std::error_code ec;
            fs::create_directories(full.parent_path(), ec);
            if (ec) throw ReportError(full.parent_path().string() + ": cannot create directory: " + ec.message());
            createdDirs_.push_back(relative.parent_path());
        }
        std::ofstream out(full, std::ios::binary | std::ios::trunc);
        if (!out) throw ReportError(full.string() + ": cannot open for writing");
        written_.push_back(relative);
        out << content;
        out.flush();
        if (!out) throw ReportError(full.string() + ": write failed");
    }

    const std::vector<fs::path>& written() const { return written_; }
    const fs::path& root() const { return root_; }
    void commit() { committed_ = true; }

private:
    fs::path root_;
    bool createdRoot_ = false;
    bool committed_ = false;
    std::vector<fs::path> written_;
    std::vector<fs::path> createdDirs_;
};

template <typename Get>
std::string perCategoryCsv(const RunResult& run, const char* column, Get get) {
    std::string out = std::string("step,category,") + column + "\n";
    for (const auto& m : run.steps) {
        for (std::size_t k = 0; k < run.categories.size(); ++k) {
            out += std::to_string(m.step) + ',' + std::to_string(k + 1) + ',' + formatNumber(get(m, k)) + '\n';
        }
    }
    return out;
}

std::string solverCsv(const RunResult& run) {
    std::string out = "step,priced,accepted,stage,norm,queries,millis\n";
    for (const auto& m : run.steps) {
        out += std::to_string(m.step) + ',' + (m.priced ? "1" : "0") + ',' + (m.accepted ? "1" : "0") + ',' +
               (m.priced ? std::string(toString(m.stage)) : std::string("none")) + ',' + formatNumber(m.residualNorm) +
               ',' + std::to_string(m.queries) + ',' + formatNumber(m.millis) + '\n';
    }
    return out;
}

std::string marketCsv(const RunResult& run) {
    std::string out = "step,spend,cumulativeSpend,replenished,trades,activeConsumers,activeProviders,queuedJobs\n";
    double cumulative = 0.0;
    for (const auto& m : run.steps) {
        cumulative += m.spend;
        int trades = 0;
        for (int t : m.trades) trades += t;
        out += std::to_string(m.step) + ',' + formatNumber(m.spend) + ',' + formatNumber(cumulative) + ',' +
               formatNumber(m.replenished) + ',' + std::to_string(trades) + ',' + std::to_string(m.activeConsumers) +
               ',' + std::to_string(m.activeProviders) + ',' + std::to_string(m.queuedJobs) + '\n';
    }
    return out;
}

template <typename Get>
LineChart perCategoryChart(const RunResult& run, std::string title, std::string yLabel, Get get) {
    LineChart chart{std::move(title), "simulation step", std::move(yLabel), {}};
    for (std::size_t k = 0; k < run.categories.size(); ++k) {
        ChartSeries s{"CPU" + std::to_string(k + 1), {}};
        for (const auto& m : run.steps) s.points.emplace_back(m.step, get(m, k));
        chart.series.push_back(std::move(s));
    }
    return chart;
}

ChartSeries cumulativeSpend(const RunResult& run, std::string label) {
    ChartSeries s{std::move(label), {}};
    double total = 0.0;
    for (const auto& m : run.steps) {
        total += m.spend;
        s.points.emplace_back(m.step, total);
    }
    return s;
}

}  // namespace

std::string summaryJson(const RunResult& run) {
    using nlohmann::ordered_json;
    const Summary& s = run.summary;
    ordered_json j;
    j["name"] = run.config.name;
    j["seed"] = run.config.seed;
    j["steps"] = s.steps;
    j["pricedSteps"] = s.pricedSteps;
    ordered_json cats = ordered_json::array();
    for (const auto& c : s.categories) {
        ordered_json e;
        e["category"] = c.index;
        e["ratio"] = c.ratio;
        e["meanPrice"] = c.meanPrice;
        e["meanUtilization"] = c.meanUtilization;
        e["meanXi"] = c.meanXi;
        cats.push_back(std::move(e));
    }
    j["categories"] = std::move(cats);
    j["residualNorm"] = {{"mean", s.residualMean},
                         {"max", s.residualMax},
                         {"ci95Low", s.residualCiLow},
                         {"ci95High", s.residualCiHigh}};
    j["meanQueries"] = s.meanQueries;
    j["meanMillis"] = s.meanMillis;
    j["totalSpend"] = s.totalSpend;
    j["diagnostics"] = {{"shortfallEvents", run.diagnostics.shortfallEvents},
                        {"shortfallAmount", run.diagnostics.shortfallAmount}};
    ordered_json config;
    for (const auto& [key, value] : configEntries(run.config)) config[key] = value;
    j["config"] = std::move(config);
    return j.dump(2) + "\n";
}

RunArtifacts emitReports(const RunResult& run, const fs::path& outDir) {
    OutputTransaction tx(outDir);
    tx.write("prices.csv", perCategoryCsv(run, "price", [](const StepMetrics& m, std::size_t k) { return m.prices[k]; }));
    tx.write("utilization.csv", perCategoryCsv(run, "utilization",
                                               [](const StepMetrics& m, std::size_t k) { return m.utilization[k]; }));
    tx.write("xi.csv", perCategoryCsv(run, "xi", [](const StepMetrics& m, std::size_t k) { return m.xi[k]; }));
    tx.write("solver.csv", solverCsv(run));
    tx.write("market.csv", marketCsv(run));
    tx.write("summary.json", summaryJson(run));

    tx.write("plots/prices.svg", renderSvg(perCategoryChart(run, "Price evolution per CPU category", "price per step",
                                                            [](const StepMetrics& m, std::size_t k) { return m.prices[k]; })));
    tx.write("plots/utilization.svg",
             renderSvg(perCategoryChart(run, "Utilization per CPU category", "utilization",
                                        [](const StepMetrics& m, std::size_t k) { return m.utilization[k]; })));
    tx.write("plots/spend.svg", renderSvg(LineChart{"Cumulative budget spent", "simulation step", "currency units",
                                                    {cumulativeSpend(run, run.config.name)}}));
    tx.commit();
    return RunArtifacts{tx.root(), tx.written()};
}

SweepResult runSweep(const SweepOptions& options, const fs::path& outDir) {
    if (options.categoryCounts.size() < 2) throw ConfigError("sweep: >= 2 presets required");
    if (options.seeds < 1) throw ConfigError("sweep: --seeds must be >= 1");
    for (std::size_t n : options.categoryCounts) (void)presetConfig(n, options.deskScale);

    OutputTransaction tx(outDir);
    SweepResult result;
    std::vector<ChartSeries> spendSeries;

    for (std::size_t n : options.categoryCounts) {
        SweepRow row;
        row.categories = n;
        bool spendRecorded = false;
        for (int s = 0; s < options.seeds; ++s) {
            ScenarioConfig cfg = presetConfig(n, options.deskScale);
            cfg.seed = options.baseSeed + static_cast<std::uint64_t>(s);
            cfg.totalSteps = options.steps;
            try {
                const RunResult run = runSimulation(cfg, options.recordTiming);
                if (options.writeRuns) {
                    emitReports(run, outDir / "runs" / (cfg.name + "-seed" + std::to_string(cfg.seed)));
                }
                ++row.runs;
                row.meanQueries += run.summary.meanQueries;
                row.meanMillis += run.summary.meanMillis;
                row.meanResidual += run.summary.residualMean;
                if (!spendRecorded) {
                    spendSeries.push_back(cumulativeSpend(run, cfg.name));
                    spendRecorded = true;
                }
            } catch (const std::exception& e) {
                ++row.failures;
                result.errors.push_back(cfg.name + " seed " + std::to_string(cfg.seed) + ": " + e.what());
            }
        }
        if (row.runs > 0) {
            row.meanQueries /= row.runs;
            row.meanMillis /= row.runs;
            row.meanResidual /= row.runs;
        }
        result.rows.push_back(row);
    }

    std::string csv = "categories,runs,failures,meanQueries,meanMillis,meanResidual\n";
    ChartSeries queries{"mean queries per priced step", {}};
    ChartSeries runtime{"mean ms per priced step", {}};
    for (const auto& r : result.rows) {
        csv += std::to_string(r.categories) + ',' + std::to_string(r.runs) + ',' + std::to_string(r.failures) + ',' +
               formatNumber(r.meanQueries) + ',' + formatNumber(r.meanMillis) + ',' + formatNumber(r.meanResidual) + '\n';
        if (r.runs > 0) {
            queries.points.emplace_back(static_cast<double>(r.categories), r.meanQueries);
            runtime.points.emplace_back(static_cast<double>(r.categories), r.meanMillis);
        }
    }
    tx.write("sweep.csv", csv);
    if (!result.errors.empty()) {
        std::string text;
        for (const auto& e : result.errors) text += e + '\n';
        tx.write("sweep_errors.txt", text);
    }
    tx.write("plots/queries.svg",
             renderSvg(LineChart{"Excess demand queries per pricing step", "CPU categories", "queries", {queries}}));
    tx.write("plots/runtime.svg",
             renderSvg(LineChart{"Equilibrium price search runtime", "CPU categories", "milliseconds", {runtime}}));
    tx.write("plots/spend.svg",
             renderSvg(LineChart{"Cumulative budget spent", "simulation step", "currency units", spendSeries}));
    tx.commit();
    return result;
}

}  // namespace gridmarket

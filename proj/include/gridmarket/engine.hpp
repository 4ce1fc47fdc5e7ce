#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gridmarket/agents.hpp"
#include "gridmarket/churn.hpp"
#include "gridmarket/domain.hpp"
#include "gridmarket/solver.hpp"

namespace gridmarket {

template <typename T>
struct Range {
    T lo{};
    T hi{};

    bool valid() const { return lo <= hi; }
    friend bool operator==(const Range&, const Range&) = default;
};

using IntRange = Range<int>;
using RealRange = Range<double>;

/// Every knob of a run. Pool sizes are given at full scale and divided by
/// `deskScale` when the world is built.
struct ScenarioConfig {
    std::string name = "custom";
    std::vector<double> ratios{1.0};
    std::vector<IntRange> cpusPerProvider{{1, 30}};

    int activeConsumers = 2000;
    int potentialConsumers = 2000;
    int activeProviders = 1000;
    int potentialProviders = 1000;
    int deskScale = 1;
    ChurnRates churn;

    IntRange jobLength{2, 10};
    int injectionPeriod = 50;
    IntRange injectionBatch{1, 150};
    double backgroundProbability = 0.15;

    RealRange initialBudget{50000.0, 125000.0};
    int allowancePeriod = 50;
    double replenishFactor = 1.0;  // replenished amount = factor * initial budget
    RealRange valuation{1.0, 1.5};

    int mprWindow = 20;
    SolverConfig solver;

    std::uint64_t seed = 1;
    int totalSteps = 150;

    std::size_t categoryCount() const { return ratios.size(); }
    int scaled(int poolSize) const { return poolSize / deskScale; }

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct StepMetrics {
    int step = 0;
    bool priced = false;
    bool accepted = false;
    SolverStage stage = SolverStage::Newton;
    std::vector<double> prices;
    std::vector<double> utilization;
    std::vector<double> xi;  // integer view at the trading price
    std::vector<int> trades;
    double residualNorm = 0.0;  // solver view; 0 when not priced
    std::uint64_t queries = 0;
    double millis = 0.0;
    double spend = 0.0;
    double replenished = 0.0;
    int activeConsumers = 0;
    int activeProviders = 0;
    long queuedJobs = 0;
};

struct CategorySummary {
    std::size_t index = 1;
    double ratio = 1.0;
    double meanPrice = 0.0;
    double meanUtilization = 0.0;
    double meanXi = 0.0;
};

struct Summary {
    int steps = 0;
    int pricedSteps = 0;
    std::vector<CategorySummary> categories;
    double residualMean = 0.0;
    double residualMax = 0.0;
    double residualCiLow = 0.0;
    double residualCiHigh = 0.0;
    double meanQueries = 0.0;
    double meanMillis = 0.0;
    double totalSpend = 0.0;
};

/// Per-category means over all steps; residual, query and runtime statistics
/// over priced steps only. The residual CI is mean +/- 1.96 standard errors.
Summary summarize(const std::vector<StepMetrics>& steps, std::span<const CategorySpec> categories);

struct Diagnostics {
    long shortfallEvents = 0;
    double shortfallAmount = 0.0;
};

struct InvariantReport {
    double moneyDrift = 0.0;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// The simulated world. Agents are addressed by id == position in their vector.
class Simulation {
public:
    explicit Simulation(ScenarioConfig cfg, bool recordTiming = true);

    /// Runs the seven step actions: churn, job injection, pricing, trading,
    /// payments and replenishment, job progress, and draining completions.
    StepMetrics runStep();

    int currentStep() const { return step_; }
    const ScenarioConfig& config() const { return cfg_; }
    const std::vector<CategorySpec>& categories() const { return categories_; }
    const std::vector<Consumer>& consumers() const { return consumers_; }
    const std::vector<Provider>& providers() const { return providers_; }
    const PriceVector& prices() const { return prices_; }
    const Diagnostics& diagnostics() const { return diagnostics_; }

    /// Checks money conservation (tolerance 1e-6), CPU accounting and job
    /// placement against the current state.
    InvariantReport checkInvariants() const;

    /// Mutable access for tests that build hand-made worlds.
    std::vector<Consumer>& mutableConsumers() { return consumers_; }
    std::vector<Provider>& mutableProviders() { return providers_; }
    /// Re-baselines money accounting after hand edits.
    void resetLedger();

private:
    void injectJobs(Consumer& c, int count);
    double settlePayments(double& replenished);
    void progressJobs();

    ScenarioConfig cfg_;
    bool recordTiming_;
    std::vector<CategorySpec> categories_;
    std::vector<Consumer> consumers_;
    std::vector<Provider> providers_;
    PriceVector prices_;
    Rng rng_;
    int step_ = 0;
    JobId nextJobId_ = 1;
    Diagnostics diagnostics_;

    long double initialWallets_ = 0;
    long double initialRevenue_ = 0;
    long double totalReplenished_ = 0;
};

struct RunResult {
    ScenarioConfig config;
    std::vector<CategorySpec> categories;
    std::vector<StepMetrics> steps;
    Summary summary;
    Diagnostics diagnostics;
};

using StepObserver = std::function<void(const Simulation&, const StepMetrics&)>;

/// Validates the configuration, then runs cfg.totalSteps steps.
RunResult runSimulation(const ScenarioConfig& cfg, bool recordTiming = true, const StepObserver& observer = {});

}  // namespace gridmarket

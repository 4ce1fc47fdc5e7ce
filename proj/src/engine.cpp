#include "gridmarket/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "gridmarket/market.hpp"

namespace gridmarket {

namespace {

constexpr double kWorkEpsilon = 1e-9;
constexpr double kMoneyTolerance = 1e-6;

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

template <typename T>
void requireRange(const Range<T>& r, const std::string& key, T minLo) {
    require(r.valid(), key + " must satisfy lo <= hi");
    require(r.lo >= minLo, key + " must not go below " + std::to_string(minLo));
}

}  // namespace

void ScenarioConfig::validate() const {
    require(!ratios.empty(), "scenario.ratios must name at least one category");
    try {
        (void)makeCategories(ratios);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("scenario.ratios: ") + e.what());
    }
    require(cpusPerProvider.size() == ratios.size(), "capacity: one range per category is required (got " +
                                                         std::to_string(cpusPerProvider.size()) + " for " +
                                                         std::to_string(ratios.size()) + " categories)");
    for (std::size_t i = 0; i < cpusPerProvider.size(); ++i) {
        requireRange(cpusPerProvider[i], "capacity.cpu" + std::to_string(i + 1), 0);
    }
    require(activeConsumers >= 0 && potentialConsumers >= 0, "pools: consumer pool sizes must be >= 0");
    require(activeProviders >= 0 && potentialProviders >= 0, "pools: provider pool sizes must be >= 0");
    require(deskScale >= 1, "pools.deskScale must be >= 1");
    try {
        churn.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("churn: ") + e.what());
    }
    requireRange(jobLength, "jobs.length", 1);
    require(injectionPeriod >= 1, "jobs.injectionPeriod must be >= 1");
    requireRange(injectionBatch, "jobs.batchSize", 0);
    require(backgroundProbability >= 0.0 && backgroundProbability <= 1.0,
            "jobs.backgroundProbability must lie in [0, 1]");
    requireRange(initialBudget, "budget.initial", 0.0);
    require(allowancePeriod >= 1, "budget.allowancePeriod must be >= 1");
    require(replenishFactor >= 0.0, "budget.replenishFactor must be >= 0");
    requireRange(valuation, "valuation.range", 0.0);
    require(valuation.lo > 0.0, "valuation.range must be strictly positive");
    require(mprWindow >= 1, "provider.mprWindow must be >= 1");
    solver.validate();
    require(totalSteps >= 0, "scenario.steps must be >= 0");
}

Simulation::Simulation(ScenarioConfig cfg, bool recordTiming)
    : cfg_(std::move(cfg)), recordTiming_(recordTiming), rng_(cfg_.seed) {
    cfg_.validate();
    categories_ = makeCategories(cfg_.ratios);
    const std::size_t n = categories_.size();
    prices_ = PriceVector(cfg_.ratios);

    const int activeP = cfg_.scaled(cfg_.activeProviders);
    const int totalP = activeP + cfg_.scaled(cfg_.potentialProviders);
    providers_.reserve(static_cast<std::size_t>(totalP));
    for (int id = 0; id < totalP; ++id) {
        Provider p;
        p.id = static_cast<AgentId>(id);
        for (std::size_t k = 0; k < n; ++k) {
            std::uniform_int_distribution<int> pc(cfg_.cpusPerProvider[k].lo, cfg_.cpusPerProvider[k].hi);
            p.capacity.push_back(pc(rng_));
            p.mpr.emplace_back(static_cast<std::size_t>(cfg_.mprWindow), prices_[k]);
        }
        p.free = p.capacity;
        p.membership = id < activeP ? Membership::Active : Membership::Potential;
        providers_.push_back(std::move(p));
    }

    const int activeC = cfg_.scaled(cfg_.activeConsumers);
    const int totalC = activeC + cfg_.scaled(cfg_.potentialConsumers);
    consumers_.reserve(static_cast<std::size_t>(totalC));
    std::uniform_real_distribution<double> budget(cfg_.initialBudget.lo, cfg_.initialBudget.hi);
    std::uniform_real_distribution<double> valuation(cfg_.valuation.lo, cfg_.valuation.hi);
    for (int id = 0; id < totalC; ++id) {
        Consumer c;
        c.id = static_cast<AgentId>(id);
        c.wallet = Money(budget(rng_));
        for (std::size_t k = 0; k < n; ++k) c.valuation.push_back(valuation(rng_));
        c.allowancePeriod = cfg_.allowancePeriod;
        c.replenishAmount = c.wallet * cfg_.replenishFactor;
        c.membership = id < activeC ? Membership::Active : Membership::Potential;
        consumers_.push_back(std::move(c));
    }
    resetLedger();
}

void Simulation::resetLedger() {
    initialWallets_ = 0;
    for (const auto& c : consumers_) initialWallets_ += c.wallet.amount();
    initialRevenue_ = 0;
    for (const auto& p : providers_) initialRevenue_ += p.revenue.amount();
    totalReplenished_ = 0;
}

void Simulation::injectJobs(Consumer& c, int count) {
    std::uniform_int_distribution<int> length(cfg_.jobLength.lo, cfg_.jobLength.hi);
    for (int i = 0; i < count; ++i) c.queue.push_back(Job::make(nextJobId_++, length(rng_)));
}

double Simulation::settlePayments(double& replenished) {
    const std::size_t n = categories_.size();
    // revenue[provider][category] earned this step
    std::vector<std::vector<double>> revenue(providers_.size(), std::vector<double>(n, 0.0));
    double spent = 0.0;
    for (auto& c : consumers_) {
        for (auto& r : c.running) {
            const double due = r.contract.ratePerStep.amount();
            const double paid = std::min(due, c.wallet.amount());
            if (paid < due) {
                ++diagnostics_.shortfallEvents;
                diagnostics_.shortfallAmount += due - paid;
            }
            c.wallet -= Money(paid);
            Provider& p = providers_[r.contract.providerId];
            p.revenue += Money(paid);
            revenue[p.id][r.contract.category] += paid;
            spent += paid;
        }
    }
    for (auto& p : providers_) {
        if (p.membership == Membership::Potential) continue;
        for (std::size_t k = 0; k < n; ++k) updateMpr(p, k, Money(revenue[p.id][k]));
    }

    replenished = 0.0;
    if ((step_ + 1) % cfg_.allowancePeriod == 0) {
        for (auto& c : consumers_) {
            if (c.membership != Membership::Active) continue;
            c.wallet += c.replenishAmount;
            replenished += c.replenishAmount.amount();
            totalReplenished_ += c.replenishAmount.amount();
        }
    }
    return spent;
}

void Simulation::progressJobs() {
    for (auto& c : consumers_) {
        auto finished = std::remove_if(c.running.begin(), c.running.end(), [&](RunningJob& r) {
            r.job.remainingWork -= categories_[r.contract.category].ratio;
            if (r.job.remainingWork > kWorkEpsilon) return false;
            r.job.remainingWork = 0.0;
            r.job.state = JobState::Done;
            ++providers_[r.contract.providerId].free[r.contract.category];
            return true;
        });
        c.running.erase(finished, c.running.end());
    }
}

StepMetrics Simulation::runStep() {
    const std::size_t n = categories_.size();
    StepMetrics m;
    m.step = step_;

    // 1. Pool membership.
    stepPools(consumers_, providers_, cfg_.churn, rng_);

    // 2. Job queues: background arrivals, then the periodic batch.
    const bool injectionStep = step_ % cfg_.injectionPeriod == 0;
    std::bernoulli_distribution background(cfg_.backgroundProbability);
    std::uniform_int_distribution<int> batch(cfg_.injectionBatch.lo, cfg_.injectionBatch.hi);
    for (auto& c : consumers_) {
        if (c.membership != Membership::Active) continue;
        if (background(rng_)) injectJobs(c, 1);
        if (injectionStep) injectJobs(c, batch(rng_));
    }

    // 3. Pricing over the frozen quotes.
    const MarketSnapshot snapshot = MarketSnapshot::capture(categories_, step_, consumers_, providers_);
    for (const auto& q : snapshot.consumers) m.queuedJobs += static_cast<long>(q.queueLength);
    m.activeConsumers = static_cast<int>(snapshot.consumers.size());
    m.activeProviders = static_cast<int>(snapshot.providers.size());

    if (snapshot.hasFreeCapacity() && snapshot.hasDemand()) {
        ExcessDemandField field(snapshot, true);
        const auto t0 = std::chrono::steady_clock::now();
        const SolverResult r = findEquilibrium(field, prices_, cfg_.solver);
        const auto t1 = std::chrono::steady_clock::now();
        prices_ = r.price;
        m.priced = true;
        m.accepted = r.accepted;
        m.stage = r.stage;
        m.residualNorm = r.residualNorm;
        m.queries = r.queries;
        if (recordTiming_) m.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    m.prices = prices_.vector();
    {
        ExcessDemandField clearingView(snapshot, false);
        m.xi = clearingView.evaluateXi(prices_, false);
    }

    // 4. Trading at the accepted (or best-effort) price.
    m.trades.assign(n, 0);
    if (m.priced) {
        std::vector<Contract> contracts = clearTrades(snapshot, prices_, rng_);
        settleTrades(contracts, consumers_, providers_);
        for (const auto& c : contracts) ++m.trades[c.category];
    }

    // Utilization while this step's jobs run.
    m.utilization.assign(n, 0.0);
    std::vector<long> allocated(n, 0);
    std::vector<long> total(n, 0);
    for (const auto& p : providers_) {
        if (p.membership == Membership::Potential) continue;
        for (std::size_t k = 0; k < n; ++k) {
            allocated[k] += p.capacity[k] - p.free[k];
            total[k] += p.capacity[k];
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (total[k] > 0) m.utilization[k] = static_cast<double>(allocated[k]) / static_cast<double>(total[k]);
    }

    // 5. Payments, MPR samples, allowance replenishment.
    m.spend = settlePayments(m.replenished);

    // 6. Job progress and retirement.
    progressJobs();

    // 7. Draining agents that are now idle leave.
    settleDraining(consumers_, providers_);

    ++step_;
    return m;
}

InvariantReport Simulation::checkInvariants() const {
    InvariantReport report;
    const std::size_t n = categories_.size();

    long double wallets = 0;
    long double revenue = 0;
    for (const auto& c : consumers_) {
        wallets += c.wallet.amount();
        if (c.wallet.amount() < 0.0) report.violations.push_back("consumer " + std::to_string(c.id) + " has a negative wallet");
    }
    for (const auto& p : providers_) revenue += p.revenue.amount();
    const long double drift = (wallets - initialWallets_ - totalReplenished_) + (revenue - initialRevenue_);
    report.moneyDrift = static_cast<double>(drift);
    if (std::abs(report.moneyDrift) > kMoneyTolerance) {
        report.violations.push_back("money drift " + std::to_string(report.moneyDrift));
    }

    // hosted[provider][category] = running jobs placed there
    std::vector<std::vector<int>> hosted(providers_.size(), std::vector<int>(n, 0));
    std::unordered_set<JobId> seen;
    for (const auto& c : consumers_) {
        for (const auto& job : c.queue) {
            if (!seen.insert(job.id).second) report.violations.push_back("job " + std::to_string(job.id) + " appears twice");
        }
        for (const auto& r : c.running) {
            if (!seen.insert(r.job.id).second) report.violations.push_back("job " + std::to_string(r.job.id) + " appears twice");
            if (r.contract.jobId != r.job.id || r.contract.consumerId != c.id) {
                report.violations.push_back("contract does not match job " + std::to_string(r.job.id));
            }
            ++hosted[r.contract.providerId][r.contract.category];
        }
        if (c.membership == Membership::Potential && !c.running.empty()) {
            report.violations.push_back("potential consumer " + std::to_string(c.id) + " still runs jobs");
        }
    }
    for (const auto& p : providers_) {
        for (std::size_t k = 0; k < n; ++k) {
            if (p.free[k] < 0 || p.free[k] > p.capacity[k]) {
                report.violations.push_back("provider " + std::to_string(p.id) + " free count out of range");
            }
            if (hosted[p.id][k] != p.capacity[k] - p.free[k]) {
                report.violations.push_back("provider " + std::to_string(p.id) + " category " + std::to_string(k + 1) +
                                            " hosts " + std::to_string(hosted[p.id][k]) + " jobs on " +
                                            std::to_string(p.capacity[k] - p.free[k]) + " busy CPUs");
            }
        }
        if (p.membership == Membership::Potential && !isIdle(p)) {
            report.violations.push_back("potential provider " + std::to_string(p.id) + " still hosts jobs");
        }
    }
    return report;
}

Summary summarize(const std::vector<StepMetrics>& steps, std::span<const CategorySpec> categories) {
    Summary s;
    s.steps = static_cast<int>(steps.size());
    if (steps.empty()) return s;

    for (const auto& cat : categories) s.categories.push_back({cat.index, cat.ratio, 0.0, 0.0, 0.0});
    for (const auto& m : steps) {
        for (std::size_t k = 0; k < s.categories.size(); ++k) {
            s.categories[k].meanPrice += m.prices[k];
            s.categories[k].meanUtilization += m.utilization[k];
            s.categories[k].meanXi += m.xi[k];
        }
        s.totalSpend += m.spend;
    }
    const auto count = static_cast<double>(steps.size());
    for (auto& c : s.categories) {
        c.meanPrice /= count;
        c.meanUtilization /= count;
        c.meanXi /= count;
    }

    std::vector<double> residuals;
    double queries = 0.0;
    double millis = 0.0;
    for (const auto& m : steps) {
        if (!m.priced) continue;
        residuals.push_back(m.residualNorm);
        queries += static_cast<double>(m.queries);
        millis += m.millis;
    }
    s.pricedSteps = static_cast<int>(residuals.size());
    if (residuals.empty()) return s;

    const auto priced = static_cast<double>(residuals.size());
    s.residualMean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / priced;
    s.residualMax = *std::max_element(residuals.begin(), residuals.end());
    s.meanQueries = queries / priced;
    s.meanMillis = millis / priced;
    double stderrMean = 0.0;
    if (residuals.size() > 1) {
        double ss = 0.0;
        for (double r : residuals) ss += (r - s.residualMean) * (r - s.residualMean);
        stderrMean = std::sqrt(ss / (priced - 1.0)) / std::sqrt(priced);
    }
    s.residualCiLow = s.residualMean - 1.96 * stderrMean;
    s.residualCiHigh = s.residualMean + 1.96 * stderrMean;
    return s;
}

RunResult runSimulation(const ScenarioConfig& cfg, bool recordTiming, const StepObserver& observer) {
    Simulation sim(cfg, recordTiming);
    RunResult result;
    result.config = cfg;
    result.categories = sim.categories();
    result.steps.reserve(static_cast<std::size_t>(cfg.totalSteps));
    for (int i = 0; i < cfg.totalSteps; ++i) {
        result.steps.push_back(sim.runStep());
        if (observer) observer(sim, result.steps.back());
    }
    result.summary = summarize(result.steps, result.categories);
    result.diagnostics = sim.diagnostics();
    return result;
}

}  // namespace gridmarket

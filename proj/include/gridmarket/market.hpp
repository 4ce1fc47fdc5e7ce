#pragma once

#include <span>
#include <vector>

#include "gridmarket/agents.hpp"
#include "gridmarket/domain.hpp"
#include "gridmarket/field.hpp"

namespace gridmarket {

/// Frozen quotes of all active agents at the start of a pricing phase.
struct MarketSnapshot {
    std::vector<CategorySpec> categories;
    int step = 0;
    std::vector<ConsumerQuote> consumers;
    std::vector<ProviderQuote> providers;

    /// Only Active agents are included; draining and potential agents never quote.
    static MarketSnapshot capture(std::span<const CategorySpec> categories, int step,
                                  std::span<const Consumer> consumers, std::span<const Provider> providers);

    bool hasDemand() const;
    bool hasFreeCapacity() const;
};

/// xi(p) = aggregate demand - aggregate supply over a snapshot. The solver
/// view uses real-valued quotes (`smoothed`); clearing uses integer quotes.
class ExcessDemandField final : public Field {
public:
    explicit ExcessDemandField(const MarketSnapshot& snapshot, bool smoothed = true)
        : snapshot_(&snapshot), smoothed_(smoothed) {}

    std::size_t dimension() const override { return snapshot_->categories.size(); }

    /// Counts as one query, regardless of mode.
    std::vector<double> evaluateXi(const PriceVector& prices, bool smoothed);

    std::vector<double> demand(std::span<const double> prices, bool smoothed) const;
    std::vector<double> supply(std::span<const double> prices, bool smoothed) const;

protected:
    std::vector<double> evaluate(std::span<const double> prices) const override;

private:
    std::vector<double> excess(std::span<const double> prices, bool smoothed) const;

    const MarketSnapshot* snapshot_;
    bool smoothed_;
};

/// Matches integer demand against integer supply at `prices`. Consumers are
/// visited in shuffled order; each takes units greedily from a shuffled
/// provider list for its chosen category. Returned contracts carry no job id
/// yet; settleTrades binds them to queued jobs.
std::vector<Contract> clearTrades(const MarketSnapshot& snapshot, const PriceVector& prices, Rng& rng);

/// Moves the front queued job of each contract's consumer onto the provider's
/// CPU and records the running job. Agents are addressed by id == position.
void settleTrades(std::vector<Contract>& contracts, std::span<Consumer> consumers, std::span<Provider> providers);

}  // namespace gridmarket

#include "gridmarket/market.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gridmarket {

MarketSnapshot MarketSnapshot::capture(std::span<const CategorySpec> categories, int step,
                                       std::span<const Consumer> consumers, std::span<const Provider> providers) {
    MarketSnapshot s;
    s.categories.assign(categories.begin(), categories.end());
    s.step = step;
    for (const auto& c : consumers) {
        if (c.membership == Membership::Active) s.consumers.push_back(quoteOf(c, step));
    }
    for (const auto& p : providers) {
        if (p.offering()) s.providers.push_back(quoteOf(p));
    }
    return s;
}

bool MarketSnapshot::hasDemand() const {
    return std::any_of(consumers.begin(), consumers.end(),
                       [](const ConsumerQuote& c) { return c.queueLength > 0 && c.spendCapacity > 0.0; });
}

bool MarketSnapshot::hasFreeCapacity() const {
    return std::any_of(providers.begin(), providers.end(), [](const ProviderQuote& p) {
        return std::any_of(p.free.begin(), p.free.end(), [](int f) { return f > 0; });
    });
}

std::vector<double> ExcessDemandField::demand(std::span<const double> prices, bool smoothed) const {
    std::vector<double> d(dimension(), 0.0);
    for (const auto& c : snapshot_->consumers) {
        const Demand dem = formulateDemand(c, snapshot_->categories, prices, smoothed);
        d[dem.category] += dem.quantity;
    }
    return d;
}

std::vector<double> ExcessDemandField::supply(std::span<const double> prices, bool smoothed) const {
    std::vector<double> s(dimension(), 0.0);
    for (const auto& p : snapshot_->providers) {
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += providerSupply(p, i, prices[i], smoothed);
    }
    return s;
}

std::vector<double> ExcessDemandField::excess(std::span<const double> prices, bool smoothed) const {
    if (prices.size() != dimension()) throw std::invalid_argument("price vector has the wrong dimension");
    std::vector<double> xi = demand(prices, smoothed);
    const std::vector<double> s = supply(prices, smoothed);
    for (std::size_t i = 0; i < xi.size(); ++i) xi[i] -= s[i];
    return xi;
}

std::vector<double> ExcessDemandField::evaluate(std::span<const double> prices) const {
    return excess(prices, smoothed_);
}

std::vector<double> ExcessDemandField::evaluateXi(const PriceVector& prices, bool smoothed) {
    recordQuery();
    return excess(prices.values(), smoothed);
}

std::vector<Contract> clearTrades(const MarketSnapshot& snapshot, const PriceVector& prices, Rng& rng) {
    const std::size_t n = snapshot.categories.size();
    if (prices.size() != n) throw std::invalid_argument("price vector has the wrong dimension");

    std::vector<std::size_t> consumerOrder(snapshot.consumers.size());
    std::iota(consumerOrder.begin(), consumerOrder.end(), 0);
    std::shuffle(consumerOrder.begin(), consumerOrder.end(), rng);

    // remaining[k][slot] is the integer supply left at providerOrder[k][slot].
    std::vector<std::vector<std::size_t>> providerOrder(n);
    std::vector<std::vector<int>> remaining(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t p = 0; p < snapshot.providers.size(); ++p) {
            if (providerSupply(snapshot.providers[p], k, prices[k], false) >= 1.0) providerOrder[k].push_back(p);
        }
        std::shuffle(providerOrder[k].begin(), providerOrder[k].end(), rng);
        for (std::size_t p : providerOrder[k]) {
            remaining[k].push_back(static_cast<int>(providerSupply(snapshot.providers[p], k, prices[k], false)));
        }
    }

    std::vector<Contract> contracts;
    std::vector<std::size_t> cursor(n, 0);
    for (std::size_t ci : consumerOrder) {
        const ConsumerQuote& c = snapshot.consumers[ci];
        const Demand d = formulateDemand(c, snapshot.categories, prices.values(), false);
        const std::size_t k = d.category;
        auto units = static_cast<int>(d.quantity);
        while (units > 0 && cursor[k] < providerOrder[k].size()) {
            int& left = remaining[k][cursor[k]];
            const int take = std::min(units, left);
            const AgentId providerId = snapshot.providers[providerOrder[k][cursor[k]]].id;
            for (int u = 0; u < take; ++u) {
                contracts.push_back(Contract{c.id, providerId, k, Money(prices[k]), 0, snapshot.step});
            }
            units -= take;
            left -= take;
            if (left == 0) ++cursor[k];
        }
    }
    return contracts;
}

void settleTrades(std::vector<Contract>& contracts, std::span<Consumer> consumers, std::span<Provider> providers) {
    for (Contract& contract : contracts) {
        Consumer& c = consumers[contract.consumerId];
        Provider& p = providers[contract.providerId];
        if (c.queue.empty()) throw std::logic_error("contract for a consumer with an empty queue");
        if (p.free[contract.category] <= 0) throw std::logic_error("contract on a provider with no free CPU");
        Job job = c.queue.front();
        c.queue.pop_front();
        job.state = JobState::Running;
        contract.jobId = job.id;
        --p.free[contract.category];
        c.running.push_back(RunningJob{job, contract});
    }
}

}  // namespace gridmarket

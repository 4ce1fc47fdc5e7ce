#pragma once

#include <span>

#include "gridmarket/agents.hpp"
#include "gridmarket/domain.hpp"

namespace gridmarket {

/// Per-step transition probabilities. `*Active` is the chance an active agent
/// leaves; `*Potential` the chance a potential agent joins.
struct ChurnRates {
    double consumerActive = 0.1;
    double consumerPotential = 0.1;
    double providerActive = 0.1;
    double providerPotential = 0.1;

    void validate() const;

    friend bool operator==(const ChurnRates&, const ChurnRates&) = default;
};

struct PoolCounts {
    int active = 0;
    int draining = 0;
    int potential = 0;

    int total() const { return active + draining + potential; }
};

struct ChurnTransitions {
    int consumersLeft = 0;
    int consumersJoined = 0;
    int providersLeft = 0;
    int providersJoined = 0;
    int consumersRetired = 0;  // draining -> potential
    int providersRetired = 0;
};

/// One churn round. All draws are taken against the memberships held at the
/// start of the call (consumers by id, then providers by id), so no agent
/// changes twice. Departing agents drain; idle draining agents then retire to
/// the potential pool immediately.
ChurnTransitions stepPools(std::span<Consumer> consumers, std::span<Provider> providers, const ChurnRates& rates,
                           Rng& rng);

/// Moves draining agents with no running work to the potential pool.
ChurnTransitions settleDraining(std::span<Consumer> consumers, std::span<Provider> providers);

bool isIdle(const Consumer& c);
bool isIdle(const Provider& p);

PoolCounts countPools(std::span<const Consumer> consumers);
PoolCounts countPools(std::span<const Provider> providers);

}  // namespace gridmarket

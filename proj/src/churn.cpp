#include "gridmarket/churn.hpp"

#include <stdexcept>
#include <tuple>
#include <vector>

namespace gridmarket {

namespace {

template <typename Agent>
PoolCounts count(std::span<const Agent> agents) {
    PoolCounts c;
    for (const auto& a : agents) {
        switch (a.membership) {
            case Membership::Active: ++c.active; break;
            case Membership::Draining: ++c.draining; break;
            case Membership::Potential: ++c.potential; break;
        }
    }
    return c;
}

// Returns (left, joined).
template <typename Agent>
std::pair<int, int> drawTransitions(std::span<Agent> agents, double leaveRate, double joinRate, Rng& rng) {
    std::bernoulli_distribution leave(leaveRate);
    std::bernoulli_distribution join(joinRate);
    std::vector<Membership> next;
    next.reserve(agents.size());
    int left = 0;
    int joined = 0;
    for (const auto& a : agents) {
        Membership m = a.membership;
        if (m == Membership::Active && leave(rng)) {
            m = Membership::Draining;
            ++left;
        } else if (m == Membership::Potential && join(rng)) {
            m = Membership::Active;
            ++joined;
        }
        next.push_back(m);
    }
    for (std::size_t i = 0; i < agents.size(); ++i) agents[i].membership = next[i];
    return {left, joined};
}

}  // namespace

void ChurnRates::validate() const {
    for (double r : {consumerActive, consumerPotential, providerActive, providerPotential}) {
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("churn rates must lie in [0, 1]");
    }
}

bool isIdle(const Consumer& c) { return c.running.empty(); }

bool isIdle(const Provider& p) { return p.free == p.capacity; }

ChurnTransitions settleDraining(std::span<Consumer> consumers, std::span<Provider> providers) {
    ChurnTransitions t;
    for (auto& c : consumers) {
        if (c.membership == Membership::Draining && isIdle(c)) {
            c.membership = Membership::Potential;
            ++t.consumersRetired;
        }
    }
    for (auto& p : providers) {
        if (p.membership == Membership::Draining && isIdle(p)) {
            p.membership = Membership::Potential;
            ++t.providersRetired;
        }
    }
    return t;
}

ChurnTransitions stepPools(std::span<Consumer> consumers, std::span<Provider> providers, const ChurnRates& rates,
                           Rng& rng) {
    ChurnTransitions t;
    std::tie(t.consumersLeft, t.consumersJoined) =
        drawTransitions(consumers, rates.consumerActive, rates.consumerPotential, rng);
    std::tie(t.providersLeft, t.providersJoined) =
        drawTransitions(providers, rates.providerActive, rates.providerPotential, rng);
    const ChurnTransitions settled = settleDraining(consumers, providers);
    t.consumersRetired = settled.consumersRetired;
    t.providersRetired = settled.providersRetired;
    return t;
}

PoolCounts countPools(std::span<const Consumer> consumers) { return count(consumers); }

PoolCounts countPools(std::span<const Provider> providers) { return count(providers); }

}  // namespace gridmarket

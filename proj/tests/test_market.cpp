#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>

#include "gridmarket/market.hpp"

using namespace gridmarket;

namespace {

MarketSnapshot snapshotOf(std::size_t n, std::vector<ConsumerQuote> cs, std::vector<ProviderQuote> ps) {
    MarketSnapshot s;
    s.categories = linearCategories(n);
    s.consumers = std::move(cs);
    s.providers = std::move(ps);
    return s;
}

MarketSnapshot randomSnapshot(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> consumers(0, 12);
    std::uniform_int_distribution<int> providers(0, 6);
    std::uniform_int_distribution<int> queue(0, 20);
    std::uniform_real_distribution<double> cap(0.0, 400.0);
    std::uniform_real_distribution<double> val(1.0, 1.5);
    std::uniform_int_distribution<int> pc(0, 15);
    std::uniform_real_distribution<double> mpr(0.5, 40.0);
    std::vector<ConsumerQuote> cs;
    const int nc = consumers(rng);
    for (int i = 0; i < nc; ++i) {
        ConsumerQuote q{static_cast<AgentId>(i), static_cast<std::size_t>(queue(rng)), cap(rng), {}};
        for (std::size_t k = 0; k < n; ++k) q.valuation.push_back(val(rng));
        cs.push_back(std::move(q));
    }
    std::vector<ProviderQuote> ps;
    const int np = providers(rng);
    for (int i = 0; i < np; ++i) {
        ProviderQuote q{static_cast<AgentId>(i), {}, {}, {}};
        for (std::size_t k = 0; k < n; ++k) {
            const int c = pc(rng);
            q.capacity.push_back(c);
            q.free.push_back(std::uniform_int_distribution<int>(0, c)(rng));
            q.mpr.push_back(mpr(rng));
        }
        ps.push_back(std::move(q));
    }
    return snapshotOf(n, std::move(cs), std::move(ps));
}

std::map<std::size_t, int> perCategory(const std::vector<Contract>& cs) {
    std::map<std::size_t, int> out;
    for (const auto& c : cs) ++out[c.category];
    return out;
}

}  // namespace

TEST_CASE("excess demand of one consumer against one provider") {
    const auto snap = snapshotOf(2, {ConsumerQuote{0, 10, 100.0, {1.0, 1.0}}},
                                 {ProviderQuote{0, {10, 10}, {10, 10}, {10.0, 20.0}}});
    ExcessDemandField field(snap);
    const auto xi = field.evaluateXi(PriceVector({10.0, 20.0}), false);
    // Hand evaluation: both categories normalize to 10, so category 1 wins the
    // tie; demand = min(10, 100 / 10) = 10; supply = 10 * min(1, p / MPR) = 10 each.
    CHECK(xi[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(xi[1] == doctest::Approx(-10.0).epsilon(1e-9));
    CHECK(field.queryCount() == 1);
}

TEST_CASE("one-sided markets") {
    const std::vector<double> p{5.0, 5.0};
    const auto noConsumers = snapshotOf(2, {}, {ProviderQuote{0, {4, 6}, {4, 6}, {1.0, 1.0}}});
    ExcessDemandField a(noConsumers);
    const auto xa = a(p);
    CHECK(xa[0] == -4.0);
    CHECK(xa[1] == -6.0);

    const auto noProviders = snapshotOf(2, {ConsumerQuote{0, 3, 100.0, {1.0, 1.0}}}, {});
    ExcessDemandField b(noProviders);
    const auto xb = b(p);
    CHECK(xb[0] == 0.0);
    CHECK(xb[1] == 3.0);
}

TEST_CASE("field evaluation is deterministic and counts every query") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto snap = randomSnapshot(rng, 3);
        ExcessDemandField field(snap);
        const std::vector<double> p{3.0, 7.0, 11.0};
        const auto a = field(p);
        const auto b = field(p);
        CHECK(a == b);
        (void)field.evaluateXi(PriceVector(p), false);
        CHECK(field.queryCount() == 3);
    }
}

TEST_CASE("smoothed excess demand falls with own price while choices hold") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        // A single category: the choice is fixed.
        const auto snap = randomSnapshot(rng, 1);
        ExcessDemandField field(snap);
        double prev = field(std::vector<double>{0.05})[0];
        for (double price = 0.1; price < 500.0; price *= 1.2) {
            const double x = field(std::vector<double>{price})[0];
            CHECK(x <= prev + 1e-9);
            prev = x;
        }
    }
}

TEST_CASE("clearing is capped by the short side") {
    Rng rng(1);
    const auto snap = snapshotOf(1, {ConsumerQuote{0, 5, 1000.0, {1.0}}}, {ProviderQuote{0, {3}, {3}, {1.0}}});
    const auto contracts = clearTrades(snap, PriceVector({2.0}), rng);
    CHECK(contracts.size() == 3);
    for (const auto& c : contracts) CHECK(c.ratePerStep.amount() == 2.0);

    const auto idle = snapshotOf(1, {ConsumerQuote{0, 0, 1000.0, {1.0}}}, {ProviderQuote{0, {3}, {3}, {1.0}}});
    CHECK(clearTrades(idle, PriceVector({2.0}), rng).empty());
}

TEST_CASE("matched volume does not depend on visiting order") {
    const auto snap = snapshotOf(1, {ConsumerQuote{0, 2, 1000.0, {1.0}}, ConsumerQuote{1, 2, 1000.0, {1.0}}},
                                 {ProviderQuote{0, {3}, {3}, {1.0}}});
    std::map<AgentId, int> winners;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        Rng rng(seed);
        const auto contracts = clearTrades(snap, PriceVector({2.0}), rng);
        CHECK(contracts.size() == 3);
        std::map<AgentId, int> got;
        for (const auto& c : contracts) ++got[c.consumerId];
        for (const auto& [id, units] : got) {
            if (units == 1) ++winners[id];
        }
    }
    // Both orders occur.
    CHECK(winners.size() == 2);
}

TEST_CASE("clearing respects integer demand and supply") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> price(0.5, 60.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        const auto snap = randomSnapshot(gen, n);
        std::vector<double> p(n);
        for (double& x : p) x = price(gen);
        ExcessDemandField field(snap);
        const auto demand = field.demand(p, false);
        const auto supply = field.supply(p, false);
        Rng rng(static_cast<std::uint64_t>(trial));
        const auto contracts = clearTrades(snap, PriceVector(p), rng);
        const auto traded = perCategory(contracts);
        for (std::size_t k = 0; k < n; ++k) {
            const int t = traded.count(k) ? traded.at(k) : 0;
            CHECK(t <= demand[k]);
            CHECK(t <= supply[k]);
        }
        std::map<AgentId, std::vector<int>> used;
        for (const auto& c : contracts) {
            auto& u = used[c.providerId];
            u.resize(n, 0);
            ++u[c.category];
        }
        for (const auto& [id, u] : used) {
            for (std::size_t k = 0; k < n; ++k) CHECK(u[k] <= snap.providers[id].free[k]);
        }
    }
}

TEST_CASE("settling binds queued jobs to CPUs") {
    std::vector<Consumer> consumers(1);
    consumers[0].queue = {Job::make(1, 3), Job::make(2, 3), Job::make(3, 3)};
    std::vector<Provider> providers(1);
    providers[0].capacity = {2};
    providers[0].free = {2};
    std::vector<Contract> contracts(2, Contract{0, 0, 0, Money(1.5), 0, 0});
    settleTrades(contracts, consumers, providers);
    CHECK(consumers[0].queue.size() == 1);
    CHECK(consumers[0].running.size() == 2);
    CHECK(consumers[0].running[0].job.state == JobState::Running);
    CHECK(contracts[1].jobId == 2);
    CHECK(providers[0].free[0] == 0);

    std::vector<Contract> extra(1, Contract{0, 0, 0, Money(1.5), 0, 0});
    CHECK_THROWS_AS(settleTrades(extra, consumers, providers), std::logic_error);
}

TEST_CASE("snapshots leave out inactive agents") {
    std::vector<Consumer> consumers(3);
    for (auto& c : consumers) {
        c.valuation = {1.0};
        c.wallet = Money(100);
        c.queue.push_back(Job::make(1, 2));
    }
    consumers[1].membership = Membership::Draining;
    consumers[2].membership = Membership::Potential;
    std::vector<Provider> providers(2);
    for (auto& p : providers) {
        p.capacity = {4};
        p.free = {4};
        p.mpr.emplace_back(5, 1.0);
    }
    providers[1].membership = Membership::Draining;
    const auto cats = linearCategories(1);
    const auto snap = MarketSnapshot::capture(cats, 0, consumers, providers);
    CHECK(snap.consumers.size() == 1);
    CHECK(snap.providers.size() == 1);
    CHECK(snap.hasDemand());
    CHECK(snap.hasFreeCapacity());
}

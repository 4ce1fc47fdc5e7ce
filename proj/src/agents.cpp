#include "gridmarket/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gridmarket {

Money Consumer::committedRate() const {
    Money total;
    for (const auto& r : running) total += r.contract.ratePerStep;
    return total;
}

RevenueWindow::RevenueWindow(std::size_t capacity, double seed) : capacity_(capacity), seed_(seed) {
    if (capacity == 0) throw std::invalid_argument("revenue window must hold at least one sample");
    if (!(seed > 0.0)) throw std::invalid_argument("revenue window seed must be positive");
}

void RevenueWindow::push(double sample) {
    samples_.push_back(sample);
    if (samples_.size() > capacity_) samples_.pop_front();
}

double RevenueWindow::mean() const {
    if (samples_.empty()) return seed_;
    return std::accumulate(samples_.begin(), samples_.end(), 0.0) / static_cast<double>(samples_.size());
}

double normalizedPrice(double price, const CategorySpec& cat, double valuation) {
    if (!(price > 0.0)) throw std::invalid_argument("price must be positive");
    if (!(valuation > 0.0)) throw std::invalid_argument("valuation must be positive");
    return price / (cat.ratio * valuation);
}

std::size_t preferredCategory(std::span<const CategorySpec> cats, std::span<const double> prices,
                              std::span<const double> valuation) {
    std::size_t best = 0;
    double bestNorm = normalizedPrice(prices[0], cats[0], valuation[0]);
    for (std::size_t i = 1; i < cats.size(); ++i) {
        const double norm = normalizedPrice(prices[i], cats[i], valuation[i]);
        if (norm < bestNorm) {
            bestNorm = norm;
            best = i;
        }
    }
    return best;
}

Money spendCapacityPerStep(const Consumer& c, int currentStep) {
    const int period = std::max(1, c.allowancePeriod);
    const int remaining = period - (currentStep % period);
    const double spread = c.wallet.amount() / static_cast<double>(remaining);
    return Money(std::max(0.0, spread - c.committedRate().amount()));
}

ConsumerQuote quoteOf(const Consumer& c, int currentStep) {
    return ConsumerQuote{c.id, c.queue.size(), spendCapacityPerStep(c, currentStep).amount(), c.valuation};
}

ProviderQuote quoteOf(const Provider& p) {
    ProviderQuote q{p.id, p.capacity, p.free, {}};
    q.mpr.reserve(p.mpr.size());
    for (const auto& w : p.mpr) q.mpr.push_back(w.mean());
    return q;
}

Demand formulateDemand(const ConsumerQuote& c, std::span<const CategorySpec> cats,
                       std::span<const double> prices, bool smoothed) {
    const std::size_t k = preferredCategory(cats, prices, c.valuation);
    if (c.queueLength == 0 || c.spendCapacity <= 0.0) return {k, 0.0};
    double q = std::min(static_cast<double>(c.queueLength), c.spendCapacity / prices[k]);
    if (!smoothed) q = std::floor(q);
    return {k, q};
}

std::vector<double> formulateDemand(const Consumer& c, int currentStep, std::span<const CategorySpec> cats,
                                    const PriceVector& prices, bool smoothed) {
    std::vector<double> out(cats.size(), 0.0);
    if (c.membership != Membership::Active) return out;
    const Demand d = formulateDemand(quoteOf(c, currentStep), cats, prices.values(), smoothed);
    out[d.category] = d.quantity;
    return out;
}

namespace {

double supplyRule(int capacity, int freeUnits, double mpr, double price, bool smoothed) {
    // A window of zero-revenue samples means any positive price beats past revenue.
    if (std::isnan(mpr) || mpr < 0.0) throw std::logic_error("mean provider revenue must not be negative");
    const double fraction = mpr == 0.0 ? 1.0 : std::min(1.0, price / mpr);
    double offered = capacity * fraction;
    if (!smoothed) offered = std::round(offered);
    return std::min(static_cast<double>(freeUnits), offered);
}

}  // namespace

double providerSupply(const ProviderQuote& prov, std::size_t category, double price, bool smoothed) {
    return supplyRule(prov.capacity[category], prov.free[category], prov.mpr[category], price, smoothed);
}

double providerSupply(const Provider& prov, std::size_t category, double price, bool smoothed) {
    if (!prov.offering()) return 0.0;
    if (!(price > 0.0)) throw std::invalid_argument("price must be positive");
    return supplyRule(prov.capacity[category], prov.free[category], prov.mpr[category].mean(), price, smoothed);
}

void updateMpr(Provider& prov, std::size_t category, Money revenueThisStep) {
    const int pc = prov.capacity[category];
    if (pc <= 0) return;
    prov.mpr[category].push(revenueThisStep.amount() / pc);
}

}  // namespace gridmarket

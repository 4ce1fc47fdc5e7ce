#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "gridmarket/domain.hpp"

namespace gridmarket {

/// Pool membership of a consumer or provider. Draining agents have left the
/// market but still finish (and pay for) running jobs.
enum class Membership { Active, Draining, Potential };

struct RunningJob {
    Job job;
    Contract contract;
};

struct Consumer {
    AgentId id = 0;
    std::deque<Job> queue;
    Money wallet;
    std::vector<double> valuation;  // one factor per category
    std::vector<RunningJob> running;
    int allowancePeriod = 50;
    Money replenishAmount;
    Membership membership = Membership::Active;

    Money committedRate() const;
};

/// Sliding window of per-resource revenue samples. The mean of an empty
/// window is the seed value.
class RevenueWindow {
public:
    RevenueWindow() = default;
    RevenueWindow(std::size_t capacity, double seed);

    void push(double sample);
    double mean() const;
    std::size_t size() const { return samples_.size(); }
    std::size_t capacity() const { return capacity_; }

private:
    std::deque<double> samples_;
    std::size_t capacity_ = 1;
    double seed_ = 1.0;
    double sum_ = 0.0;
};

struct Provider {
    AgentId id = 0;
    std::vector<int> capacity;  // PC_i
    std::vector<int> free;
    std::vector<RevenueWindow> mpr;
    Money revenue;  // lifetime total
    Membership membership = Membership::Active;

    bool offering() const { return membership == Membership::Active; }
};

/// Frozen view of a consumer for one pricing phase.
struct ConsumerQuote {
    AgentId id = 0;
    std::size_t queueLength = 0;
    double spendCapacity = 0.0;
    std::vector<double> valuation;
};

/// Frozen view of an offering provider for one pricing phase.
struct ProviderQuote {
    AgentId id = 0;
    std::vector<int> capacity;
    std::vector<int> free;
    std::vector<double> mpr;
};

/// The one category a consumer demands in and how much.
struct Demand {
    std::size_t category = 0;
    double quantity = 0.0;
};

/// p_i / (r_i * v_i). Throws std::invalid_argument on non-positive price or valuation.
double normalizedPrice(double price, const CategorySpec& cat, double valuation);

/// Category minimizing the normalized price; ties go to the lowest index.
std::size_t preferredCategory(std::span<const CategorySpec> cats, std::span<const double> prices,
                              std::span<const double> valuation);

/// Per-step budget the consumer can still commit at `currentStep`: the wallet
/// spread over the steps left in the allowance period, minus live contract rates.
Money spendCapacityPerStep(const Consumer& c, int currentStep);

ConsumerQuote quoteOf(const Consumer& c, int currentStep);
ProviderQuote quoteOf(const Provider& p);

Demand formulateDemand(const ConsumerQuote& c, std::span<const CategorySpec> cats,
                       std::span<const double> prices, bool smoothed);

/// Dense form: n components, at most one of them nonzero.
std::vector<double> formulateDemand(const Consumer& c, int currentStep, std::span<const CategorySpec> cats,
                                    const PriceVector& prices, bool smoothed);

/// PC_i * min(1, p_i / MPR_i), clamped to free units. Integer mode rounds to
/// nearest before clamping. An MPR of exactly zero offers everything free;
/// a negative or NaN MPR throws std::logic_error.
double providerSupply(const ProviderQuote& prov, std::size_t category, double price, bool smoothed);
double providerSupply(const Provider& prov, std::size_t category, double price, bool smoothed);

/// Records this step's revenue for a category as a per-resource sample.
/// Categories where the provider hosts no CPUs are skipped.
void updateMpr(Provider& prov, std::size_t category, Money revenueThisStep);

}  // namespace gridmarket

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gridmarket {

using AgentId = std::uint32_t;
using JobId = std::uint64_t;
using Rng = std::mt19937_64;

/// A CPU commodity class. `index` is 1-based; `ratio` is the speedup relative
/// to the reference category (index 1, ratio 1).
struct CategorySpec {
    std::size_t index = 1;
    double ratio = 1.0;
};

/// Builds a validated category list from performance ratios. The first ratio
/// must be exactly 1 and ratios must be strictly increasing.
/// Throws std::invalid_argument otherwise.
std::vector<CategorySpec> makeCategories(std::span<const double> ratios);

/// Ratios 1, 2, ..., n.
std::vector<CategorySpec> linearCategories(std::size_t n);

enum class JobState { Queued, Running, Done };

struct Job {
    JobId id = 0;
    int normalizedLength = 1;  // steps on the reference CPU
    double remainingWork = 1;  // reference-CPU step units
    JobState state = JobState::Queued;

    static Job make(JobId id, int normalizedLength);
};

/// Steps a job needs on a CPU of the given category (ceiling division, at least 1).
int durationOnCategory(const Job& job, const CategorySpec& cat);

class Money {
public:
    constexpr Money() = default;
    constexpr explicit Money(double amount) : amount_(amount) {}

    constexpr double amount() const { return amount_; }

    constexpr Money& operator+=(Money o) { amount_ += o.amount_; return *this; }
    constexpr Money& operator-=(Money o) { amount_ -= o.amount_; return *this; }
    friend constexpr Money operator+(Money a, Money b) { return a += b; }
    friend constexpr Money operator-(Money a, Money b) { return a -= b; }
    friend constexpr Money operator*(Money a, double k) { return Money(a.amount_ * k); }
    friend constexpr Money operator/(Money a, double k) { return Money(a.amount_ / k); }
    friend constexpr auto operator<=>(Money, Money) = default;

private:
    double amount_ = 0.0;
};

/// One strictly positive price per category.
class PriceVector {
public:
    PriceVector() = default;
    /// Throws std::invalid_argument if any price is not finite and > 0.
    explicit PriceVector(std::vector<double> prices);

    std::size_t size() const { return prices_.size(); }
    double operator[](std::size_t i) const { return prices_[i]; }
    std::span<const double> values() const { return prices_; }
    const std::vector<double>& vector() const { return prices_; }

    friend bool operator==(const PriceVector&, const PriceVector&) = default;

private:
    std::vector<double> prices_;
};

/// A sale: `ratePerStep` is charged every step the job runs. `category` is the
/// 0-based position of the category in the market's category list.
struct Contract {
    AgentId consumerId = 0;
    AgentId providerId = 0;
    std::size_t category = 0;
    Money ratePerStep;
    JobId jobId = 0;
    int startStep = 0;
};

/// Euclidean norm of an excess-demand vector.
double euclideanNorm(std::span<const double> xi);

}  // namespace gridmarket

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gridmarket {

/// An excess-demand surface p -> xi(p). Every evaluation through operator()
/// counts as one query.
class Field {
public:
    virtual ~Field() = default;

    virtual std::size_t dimension() const = 0;

    std::vector<double> operator()(std::span<const double> prices) {
        recordQuery();
        return evaluate(prices);
    }

    std::uint64_t queryCount() const { return queries_.load(std::memory_order_relaxed); }

protected:
    virtual std::vector<double> evaluate(std::span<const double> prices) const = 0;

    void recordQuery() { queries_.fetch_add(1, std::memory_order_relaxed); }

private:
    std::atomic<std::uint64_t> queries_{0};
};

/// Field backed by a callable; used for synthetic surfaces.
class FunctionField final : public Field {
public:
    using Fn = std::function<std::vector<double>(std::span<const double>)>;

    FunctionField(std::size_t dimension, Fn fn) : dimension_(dimension), fn_(std::move(fn)) {}

    std::size_t dimension() const override { return dimension_; }

protected:
    std::vector<double> evaluate(std::span<const double> prices) const override { return fn_(prices); }

private:
    std::size_t dimension_;
    Fn fn_;
};

}  // namespace gridmarket

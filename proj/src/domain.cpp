#include "gridmarket/domain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gridmarket {

std::vector<CategorySpec> makeCategories(std::span<const double> ratios) {
    if (ratios.empty()) throw std::invalid_argument("at least one category is required");
    if (ratios[0] != 1.0) throw std::invalid_argument("the reference category must have ratio 1");
    std::vector<CategorySpec> cats;
    cats.reserve(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!std::isfinite(ratios[i]) || (i > 0 && ratios[i] <= ratios[i - 1])) {
            throw std::invalid_argument("category ratios must be strictly increasing (category " +
                                        std::to_string(i + 1) + ")");
        }
        cats.push_back({i + 1, ratios[i]});
    }
    return cats;
}

std::vector<CategorySpec> linearCategories(std::size_t n) {
    std::vector<double> ratios(n);
    for (std::size_t i = 0; i < n; ++i) ratios[i] = static_cast<double>(i + 1);
    return makeCategories(ratios);
}

Job Job::make(JobId id, int normalizedLength) {
    if (normalizedLength < 1) throw std::invalid_argument("job length must be at least 1");
    return Job{id, normalizedLength, static_cast<double>(normalizedLength), JobState::Queued};
}

int durationOnCategory(const Job& job, const CategorySpec& cat) {
    const double steps = std::ceil(static_cast<double>(job.normalizedLength) / cat.ratio);
    return std::max(1, static_cast<int>(steps));
}

PriceVector::PriceVector(std::vector<double> prices) : prices_(std::move(prices)) {
    for (std::size_t i = 0; i < prices_.size(); ++i) {
        if (!std::isfinite(prices_[i]) || prices_[i] <= 0.0) {
            throw std::invalid_argument("price " + std::to_string(i + 1) + " must be positive and finite");
        }
    }
}

double euclideanNorm(std::span<const double> xi) {
    double sum = 0.0;
    for (double x : xi) sum += x * x;
    return std::sqrt(sum);
}

}  // namespace gridmarket

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "gridmarket/domain.hpp"
#include "gridmarket/field.hpp"

namespace gridmarket {

struct SolverConfig {
    // Controller thresholds.
    double normThreshold = 80.0;
    int maxControllerIterations = 10;
    double minImprovement = 1.0;

    double priceMin = 1e-2;
    double priceMax = 1e6;

    // Newton stage.
    int newtonMaxSteps = 100;
    double fdRelStep = 1e-4;
    double fdMinStep = 1e-3;
    double damping = 1.0;
    int maxHalvings = 6;
    double successTolerance = 1e-6;

    // Pattern stage. The mesh is a step in log-price, so a poll multiplies a
    // price by exp(+-mesh).
    double patternInitialMesh = 1.0;
    double patternShrink = 0.5;
    double patternExpand = 2.0;
    double patternMinMesh = 1e-6;
    int patternMaxEvals = 2000;
    // Doublings along a direction whose poll tied, before giving up on it.
    int patternPlateauExpansions = 24;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

enum class SolverStage { Newton, Pattern, Mixed };

std::string_view toString(SolverStage stage);

struct SolverResult {
    PriceVector price;
    double residualNorm = 0.0;
    std::uint64_t queries = 0;
    int controllerIterations = 0;
    SolverStage stage = SolverStage::Newton;
    bool accepted = false;
};

using Matrix = std::vector<std::vector<double>>;

/// Forward-difference Jacobian, J[i][j] ~ d xi_i / d p_j, with step
/// max(fdRelStep * p_j, fdMinStep). Costs n + 1 queries. Steps that would
/// leave the price box are taken backwards instead. Non-finite entries are 0.
Matrix fdJacobian(Field& field, std::span<const double> prices, const SolverConfig& cfg = {});

/// Same, reusing a known xi(p); costs n queries.
Matrix fdJacobian(Field& field, std::span<const double> prices, std::span<const double> xiAtPrices,
                  const SolverConfig& cfg);

/// Damped global-Newton iteration on xi with backtracking. `accepted` is set
/// only when the residual reaches cfg.successTolerance.
SolverResult esgnSolve(Field& field, const PriceVector& p0, const SolverConfig& cfg);

/// Bound-constrained compass search minimizing |xi(p)| over log-prices,
/// polling each axis and (for n > 1) uniform scaling of all prices. Always returns the
/// best point seen; `accepted` is set when the residual is below the
/// controller threshold.
SolverResult patternSearch(Field& field, const PriceVector& p0, const SolverConfig& cfg);

/// Newton first, then alternating pattern and Newton passes while the residual
/// is at or above the threshold, the iteration cap is not reached, and the
/// last pattern pass improved the residual by more than cfg.minImprovement.
SolverResult findEquilibrium(Field& field, const PriceVector& p0, const SolverConfig& cfg);

}  // namespace gridmarket

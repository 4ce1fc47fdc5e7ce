#include "gridmarket/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridmarket {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double residual(std::span<const double> xi) {
    for (double x : xi) {
        if (!std::isfinite(x)) return kInf;
    }
    return euclideanNorm(xi);
}

double clampPrice(double candidate, double current, const SolverConfig& cfg) {
    if (std::isnan(candidate)) return current;
    return std::clamp(candidate, cfg.priceMin, cfg.priceMax);
}

std::vector<double> clampAll(std::span<const double> p, const SolverConfig& cfg) {
    std::vector<double> out(p.begin(), p.end());
    for (double& x : out) x = clampPrice(x, cfg.priceMin, cfg);
    return out;
}

struct Probe {
    std::vector<double> price;
    std::vector<double> xi;
    double norm = kInf;
};

Probe probe(Field& field, std::vector<double> price) {
    Probe pr;
    pr.xi = field(price);
    pr.norm = residual(pr.xi);
    pr.price = std::move(price);
    return pr;
}

}  // namespace

void SolverConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(what);
    };
    require(normThreshold > 0.0, "solver.normThreshold must be > 0");
    require(maxControllerIterations >= 1, "solver.maxControllerIterations must be >= 1");
    require(minImprovement >= 0.0, "solver.minImprovement must be >= 0");
    require(priceMin > 0.0, "solver.priceMin must be > 0");
    require(priceMax > priceMin, "solver.priceMax must exceed solver.priceMin");
    require(newtonMaxSteps >= 0, "solver.newtonMaxSteps must be >= 0");
    require(fdRelStep > 0.0 && fdMinStep > 0.0, "solver.fdRelStep and solver.fdMinStep must be > 0");
    require(damping > 0.0 && damping <= 1.0, "solver.damping must be in (0, 1]");
    require(maxHalvings >= 0, "solver.maxHalvings must be >= 0");
    require(successTolerance >= 0.0, "solver.successTolerance must be >= 0");
    require(patternInitialMesh > 0.0, "solver.patternInitialMesh must be > 0");
    require(patternShrink > 0.0 && patternShrink < 1.0, "solver.patternShrink must be in (0, 1)");
    require(patternExpand >= 1.0, "solver.patternExpand must be >= 1");
    require(patternMinMesh > 0.0, "solver.patternMinMesh must be > 0");
    require(patternMaxEvals >= 1, "solver.patternMaxEvals must be >= 1");
    require(patternPlateauExpansions >= 0, "solver.patternPlateauExpansions must be >= 0");
}

std::string_view toString(SolverStage stage) {
    switch (stage) {
        case SolverStage::Newton: return "newton";
        case SolverStage::Pattern: return "pattern";
        case SolverStage::Mixed: return "mixed";
    }
    return "unknown";
}

Matrix fdJacobian(Field& field, std::span<const double> prices, std::span<const double> xiAtPrices,
                  const SolverConfig& cfg) {
    const std::size_t n = prices.size();
    Matrix jac(xiAtPrices.size(), std::vector<double>(n, 0.0));
    std::vector<double> shifted(prices.begin(), prices.end());
    for (std::size_t j = 0; j < n; ++j) {
        double h = std::max(cfg.fdRelStep * prices[j], cfg.fdMinStep);
        if (prices[j] + h > cfg.priceMax) h = -h;
        shifted[j] = prices[j] + h;
        const std::vector<double> xi = field(shifted);
        shifted[j] = prices[j];
        for (std::size_t i = 0; i < xiAtPrices.size(); ++i) {
            const double d = (xi[i] - xiAtPrices[i]) / h;
            jac[i][j] = std::isfinite(d) ? d : 0.0;
        }
    }
    return jac;
}

Matrix fdJacobian(Field& field, std::span<const double> prices, const SolverConfig& cfg) {
    const std::vector<double> xi = field(prices);
    return fdJacobian(field, prices, xi, cfg);
}

SolverResult esgnSolve(Field& field, const PriceVector& p0, const SolverConfig& cfg) {
    const std::uint64_t startQueries = field.queryCount();
    const std::size_t n = p0.size();

    Probe cur = probe(field, clampAll(p0.values(), cfg));

    for (int step = 0; step < cfg.newtonMaxSteps && cur.norm > cfg.successTolerance; ++step) {
        if (!std::isfinite(cur.norm)) break;

        const Matrix jac = fdJacobian(field, cur.price, cur.xi, cfg);
        Eigen::MatrixXd J(n, n);
        Eigen::VectorXd rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            rhs(i) = -cur.xi[i];
            for (std::size_t j = 0; j < n; ++j) J(i, j) = jac[i][j];
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        if (!(lu.rcond() > 1e-13)) break;  // singular: leave it to the pattern stage
        const Eigen::VectorXd delta = lu.solve(rhs);
        if (!delta.allFinite()) break;

        double lambda = cfg.damping;
        bool moved = false;
        double stepLength = 0.0;
        for (int halving = 0; halving <= cfg.maxHalvings; ++halving, lambda *= 0.5) {
            std::vector<double> trial(n);
            for (std::size_t j = 0; j < n; ++j) {
                trial[j] = clampPrice(cur.price[j] + lambda * delta(static_cast<Eigen::Index>(j)), cur.price[j], cfg);
            }
            if (trial == cur.price) break;
            Probe next = probe(field, std::move(trial));
            if (next.norm < cur.norm) {
                stepLength = 0.0;
                for (std::size_t j = 0; j < n; ++j) stepLength = std::max(stepLength, std::abs(next.price[j] - cur.price[j]) / cur.price[j]);
                cur = std::move(next);
                moved = true;
                break;
            }
        }
        if (!moved || stepLength < 1e-14) break;
    }

    SolverResult r;
    r.price = PriceVector(cur.price);
    r.residualNorm = cur.norm;
    r.queries = field.queryCount() - startQueries;
    r.controllerIterations = 1;
    r.stage = SolverStage::Newton;
    r.accepted = cur.norm <= cfg.successTolerance;
    return r;
}

SolverResult patternSearch(Field& field, const PriceVector& p0, const SolverConfig& cfg) {
    const std::uint64_t startQueries = field.queryCount();
    const std::size_t n = p0.size();

    // Poll directions in log-price space: the 2n coordinate axes, plus the
    // uniform scaling pair, along which quote sets are often flat.
    std::vector<std::vector<double>> directions;
    for (std::size_t j = 0; j < n; ++j) {
        for (double sign : {1.0, -1.0}) {
            std::vector<double> d(n, 0.0);
            d[j] = sign;
            directions.push_back(std::move(d));
        }
    }
    if (n > 1) {
        directions.emplace_back(n, 1.0);
        directions.emplace_back(n, -1.0);
    }

    Probe cur = probe(field, clampAll(p0.values(), cfg));
    int evals = 1;
    auto budgetLeft = [&] { return evals < cfg.patternMaxEvals; };

    auto pointAt = [&](const std::vector<double>& d, double step) {
        std::vector<double> trial = cur.price;
        for (std::size_t j = 0; j < n; ++j) {
            if (d[j] != 0.0) trial[j] = clampPrice(cur.price[j] * std::exp(d[j] * step), cur.price[j], cfg);
        }
        return trial;
    };

    // A poll that scores exactly like cur sits on a plateau. Walk outwards
    // along d by doubling until the score changes, then bisect back towards
    // the plateau edge if it got worse. Returns true if cur moved.
    auto escapePlateau = [&](const std::vector<double>& d, double tieStep) {
        double lo = tieStep;
        double hi = tieStep;
        std::vector<double> last = pointAt(d, lo);
        bool worse = false;
        for (int k = 0; k < cfg.patternPlateauExpansions && budgetLeft(); ++k) {
            hi = 2.0 * lo;
            std::vector<double> trial = pointAt(d, hi);
            if (trial == last) return false;  // pinned at a bound
            Probe next = probe(field, trial);
            ++evals;
            if (next.norm < cur.norm) {
                cur = std::move(next);
                return true;
            }
            if (next.norm != cur.norm) {
                worse = true;
                break;
            }
            lo = hi;
            last = std::move(trial);
        }
        if (!worse) return false;
        while (hi - lo > cfg.patternMinMesh && budgetLeft()) {
            const double mid = 0.5 * (lo + hi);
            Probe next = probe(field, pointAt(d, mid));
            ++evals;
            if (next.norm < cur.norm) {
                cur = std::move(next);
                return true;
            }
            (next.norm == cur.norm ? lo : hi) = mid;
        }
        return false;
    };

    double mesh = cfg.patternInitialMesh;
    while (cur.norm > 0.0 && mesh >= cfg.patternMinMesh && budgetLeft()) {
        bool improved = false;
        for (const auto& d : directions) {
            if (!budgetLeft()) break;
            std::vector<double> trial = pointAt(d, mesh);
            if (trial == cur.price) continue;
            Probe next = probe(field, std::move(trial));
            ++evals;
            if (next.norm < cur.norm) {
                cur = std::move(next);
                improved = true;
                break;
            }
            if (next.norm == cur.norm && escapePlateau(d, mesh)) {
                improved = true;
                break;
            }
        }
        mesh *= improved ? cfg.patternExpand : cfg.patternShrink;
    }

    SolverResult r;
    r.price = PriceVector(cur.price);
    r.residualNorm = cur.norm;
    r.queries = field.queryCount() - startQueries;
    r.controllerIterations = 1;
    r.stage = SolverStage::Pattern;
    r.accepted = cur.norm < cfg.normThreshold;
    return r;
}

SolverResult findEquilibrium(Field& field, const PriceVector& p0, const SolverConfig& cfg) {
    const std::uint64_t startQueries = field.queryCount();

    SolverResult best = esgnSolve(field, p0, cfg);
    int iterations = 1;
    bool patternRan = false;
    double lastImprovement = kInf;

    while (best.residualNorm >= cfg.normThreshold && iterations < cfg.maxControllerIterations &&
           lastImprovement > cfg.minImprovement) {
        const SolverResult polled = patternSearch(field, best.price, cfg);
        lastImprovement = best.residualNorm - polled.residualNorm;
        patternRan = true;
        ++iterations;

        // Newton restarts from the polled point and only ever keeps improvements on it.
        const SolverResult refined = esgnSolve(field, polled.price, cfg);
        const SolverResult& better = refined.residualNorm <= polled.residualNorm ? refined : polled;
        if (better.residualNorm < best.residualNorm) best = better;
    }

    best.queries = field.queryCount() - startQueries;
    best.controllerIterations = iterations;
    best.stage = patternRan ? SolverStage::Mixed : SolverStage::Newton;
    best.accepted = best.residualNorm < cfg.normThreshold;
    return best;
}

}  // namespace gridmarket

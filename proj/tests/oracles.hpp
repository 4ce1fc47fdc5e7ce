#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double norm(const std::vector<double>& v) {
    long double s = 0;
    for (double x : v) s += static_cast<long double>(x) * x;
    return static_cast<double>(std::sqrt(s));
}

// Root of a continuous f with f(lo) and f(hi) of opposite sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// First grid point minimizing g over [lo, hi] at the given resolution.
inline double gridArgmin(const std::function<double(double)>& g, double lo, double hi, double step) {
    double best = lo;
    double bestValue = g(lo);
    const auto count = static_cast<long>(std::floor((hi - lo) / step));
    for (long i = 1; i <= count; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const double v = g(x);
        if (v < bestValue) {
            bestValue = v;
            best = x;
        }
    }
    return best;
}

inline double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace oracle

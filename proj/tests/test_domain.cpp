#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "gridmarket/domain.hpp"
#include "oracles.hpp"

using namespace gridmarket;

TEST_CASE("duration rounds up on faster CPUs") {
    CHECK(durationOnCategory(Job::make(1, 10), CategorySpec{1, 1.0}) == 10);
    CHECK(durationOnCategory(Job::make(1, 10), CategorySpec{3, 3.0}) == 4);
    CHECK(durationOnCategory(Job::make(1, 2), CategorySpec{6, 6.0}) == 1);
}

TEST_CASE("duration never grows with the ratio") {
    for (int len = 1; len <= 40; ++len) {
        int prev = durationOnCategory(Job::make(1, len), CategorySpec{1, 1.0});
        for (double r = 1.25; r <= 12.0; r += 0.25) {
            const int d = durationOnCategory(Job::make(1, len), CategorySpec{2, r});
            CHECK(d <= prev);
            CHECK(d >= 1);
            prev = d;
        }
    }
}

TEST_CASE("job construction") {
    const Job j = Job::make(7, 4);
    CHECK(j.remainingWork == 4.0);
    CHECK(j.state == JobState::Queued);
    CHECK_THROWS_AS(Job::make(1, 0), std::invalid_argument);
}

TEST_CASE("euclidean norm examples") {
    const std::vector<double> a{3, 4};
    CHECK(euclideanNorm(a) == doctest::Approx(5.0).epsilon(1e-12));
    const std::vector<double> zero{0, 0, 0};
    CHECK(euclideanNorm(zero) == 0.0);

    const std::vector<double> row{-11.36, -16.18, -23.07, -23.22, -27.08, -36.68};
    const double expected = oracle::norm(row);
    CHECK(euclideanNorm(row) == doctest::Approx(expected).epsilon(1e-12));
    // Square-root sum by hand: sqrt(3540.9781) = 59.5062.
    CHECK(std::abs(expected - 59.5062) <= 1e-4);
}

TEST_CASE("norm properties on random vectors") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1000, 1000);
    std::uniform_int_distribution<int> len(1, 8);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(len(rng)));
        for (double& x : v) x = u(rng);
        const double n = euclideanNorm(v);
        CHECK(n >= 0.0);
        CHECK(n == doctest::Approx(oracle::norm(v)).epsilon(1e-12));

        std::vector<double> shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(euclideanNorm(shuffled) == doctest::Approx(n).epsilon(1e-12));

        const double c = u(rng) / 100.0;
        std::vector<double> scaled = v;
        for (double& x : scaled) x *= c;
        CHECK(euclideanNorm(scaled) == doctest::Approx(std::abs(c) * n).epsilon(1e-12));
    }
}

TEST_CASE("categories validate their ratios") {
    const auto lin = linearCategories(3);
    REQUIRE(lin.size() == 3);
    CHECK(lin[0].index == 1);
    CHECK(lin[2].ratio == 3.0);

    const std::vector<double> bad1{2.0, 3.0};
    CHECK_THROWS_AS(makeCategories(bad1), std::invalid_argument);
    const std::vector<double> bad2{1.0, 2.0, 2.0};
    CHECK_THROWS_AS(makeCategories(bad2), std::invalid_argument);
    const std::vector<double> ok{1.0, 1.5, 4.0};
    CHECK(makeCategories(ok)[1].index == 2);
}

TEST_CASE("price vectors reject non-positive entries") {
    CHECK_THROWS_AS(PriceVector({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(PriceVector({-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PriceVector({std::nan("")}), std::invalid_argument);
    const PriceVector p({1.5, 2.5});
    CHECK(p.size() == 2);
    CHECK(p[1] == 2.5);
}

TEST_CASE("money arithmetic") {
    Money m(10.0);
    m += Money(2.5);
    m -= Money(0.5);
    CHECK(m.amount() == 12.0);
    CHECK((m * 2.0).amount() == 24.0);
    CHECK(Money(1.0) < Money(2.0));
}

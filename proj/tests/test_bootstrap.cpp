#include <doctest.h>

#include <cmath>
#include <vector>

#include "tps/bootstrap.hpp"
#include "tps/rng.hpp"

TEST_CASE("bootstrap of a constant sample is degenerate") {
    const std::vector<double> values(25, 3.5);
    const auto bs = tps::bootstrap_mean(values, 200, 0.95, 1);
    CHECK(bs.estimate == 3.5);
    CHECK(bs.se == 0.0);
    CHECK(bs.ci_low == 3.5);
    CHECK(bs.ci_high == 3.5);
    CHECK(bs.replicates == 200);
}

TEST_CASE("single observation resamples to itself") {
    const std::vector<double> values = {1.25};
    const auto bs = tps::bootstrap_mean(values, 50, 0.95, 9);
    CHECK(bs.estimate == 1.25);
    CHECK(bs.se == 0.0);
    CHECK(bs.ci_low == 1.25);
    CHECK(bs.ci_high == 1.25);
}

TEST_CASE("fixed seed and input give bit-identical summaries") {
    std::vector<double> values;
    tps::SplitMix64 rng(3);
    for (int i = 0; i < 100; ++i) values.push_back(rng.next_double());
    const auto a = tps::bootstrap_mean(values, 1000, 0.95, 42);
    const auto b = tps::bootstrap_mean(values, 1000, 0.95, 42);
    CHECK(a.estimate == b.estimate);
    CHECK(a.se == b.se);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
    const auto c = tps::bootstrap_mean(values, 1000, 0.95, 43);
    CHECK(a.ci_low != c.ci_low);
    // Interval sanity on a well-behaved sample.
    CHECK(a.ci_low <= a.estimate);
    CHECK(a.estimate <= a.ci_high);
    CHECK(a.se > 0.0);
}

TEST_CASE("percentile endpoints interpolate order statistics at rank 1 + (B-1) p") {
    std::vector<double> sorted(1000);
    for (int i = 0; i < 1000; ++i) sorted[i] = static_cast<double>(i + 1);
    // rank = 1 + 999 * 0.025 = 25.975 ; 1 + 999 * 0.975 = 975.025.
    CHECK(tps::detail::percentile(sorted, 0.025) == doctest::Approx(25.975).epsilon(1e-12));
    CHECK(tps::detail::percentile(sorted, 0.975) == doctest::Approx(975.025).epsilon(1e-12));
    CHECK(tps::detail::percentile(sorted, 0.0) == 1.0);
    CHECK(tps::detail::percentile(sorted, 1.0) == 1000.0);
}

TEST_CASE("paired differences cancel shared resampling noise") {
    std::vector<double> a, b;
    tps::SplitMix64 rng(8);
    for (int i = 0; i < 60; ++i) {
        a.push_back(rng.next_double());
        b.push_back(a.back());
    }
    const auto same = tps::bootstrap_paired_diff(a, b, 300, 0.95, 2);
    CHECK(same.estimate == 0.0);
    CHECK(same.se == 0.0);
    for (double& v : b) v -= 1.0;
    const auto shifted = tps::bootstrap_paired_diff(a, b, 300, 0.95, 2);
    CHECK(shifted.estimate == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(shifted.se <= 1e-12);
    b.pop_back();
    CHECK_THROWS_AS(tps::bootstrap_paired_diff(a, b, 10, 0.95, 2), tps::InvalidInput);
}

TEST_CASE("argument guards") {
    CHECK_THROWS_AS(tps::bootstrap_mean({}, 10, 0.95, 1), tps::EmptyPopulation);
    const std::vector<double> v = {1.0, 2.0};
    CHECK_THROWS_AS(tps::bootstrap_mean(v, 0, 0.95, 1), tps::InvalidInput);
    CHECK_THROWS_AS(tps::bootstrap_mean(v, 10, 1.5, 1), tps::InvalidInput);
}

TEST_CASE("union practice-gap bootstrap") {
    std::vector<double> complete, censored;
    tps::SplitMix64 rng(12);
    for (int i = 0; i < 40; ++i) complete.push_back(-1.0 + 0.2 * rng.next_double());
    for (int i = 0; i < 20; ++i) censored.push_back(-2.0 + 0.2 * rng.next_double());

    SUBCASE("no censored members means a zero gap in every replicate") {
        const auto bs = tps::bootstrap_union_delta_practice(complete, {}, 200, 0.95, 5);
        CHECK(bs.estimate == 0.0);
        CHECK(bs.se == 0.0);
        CHECK(bs.ci_low == 0.0);
        CHECK(bs.ci_high == 0.0);
    }
    SUBCASE("all-censored populations are rejected") {
        CHECK_THROWS_AS(tps::bootstrap_union_delta_practice({}, censored, 10, 0.95, 1),
                        tps::EmptyPopulation);
    }
    SUBCASE("matches an independent reference resampler replicate-for-replicate") {
        const std::size_t B = 400;
        const auto bs = tps::bootstrap_union_delta_practice(complete, censored, B, 0.95, 77);
        // Reference: same substream contract, naive bookkeeping.
        const std::size_t n = complete.size() + censored.size();
        std::vector<double> reps;
        for (std::size_t rep = 0; rep < B; ++rep) {
            auto rr = tps::substream(77, rep);
            std::vector<std::size_t> draw(n);
            for (auto& d : draw) d = rr.next_below(n);
            double u = 0.0, c = 0.0;
            std::size_t nc = 0;
            for (auto d : draw) {
                const double v =
                    d < complete.size() ? complete[d] : censored[d - complete.size()];
                u += v;
                if (d < complete.size()) {
                    c += v;
                    ++nc;
                }
            }
            REQUIRE(nc > 0);  // practically certain with 40 complete of 60
            reps.push_back(u / static_cast<double>(n) - c / static_cast<double>(nc));
        }
        std::sort(reps.begin(), reps.end());
        CHECK(bs.ci_low == tps::detail::percentile(reps, 0.025));
        CHECK(bs.ci_high == tps::detail::percentile(reps, 0.975));
        // The gap here is negative by construction: censored extensions drag
        // the union mean below the complete-only mean.
        CHECK(bs.estimate < 0.0);
        CHECK(bs.ci_high < 0.0);
    }
}

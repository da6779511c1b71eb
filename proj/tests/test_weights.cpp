#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tps/weights.hpp"

using tps::WeightSchedule;

namespace {
const WeightSchedule kAll[] = {{WeightSchedule::Kind::linear_front},
                               {WeightSchedule::Kind::uniform},
                               {WeightSchedule::Kind::exponential_front},
                               {WeightSchedule::Kind::linear_back}};
}

TEST_CASE("every schedule is positive and sums to one") {
    for (const auto sched : kAll)
        for (std::size_t T : {1, 2, 3, 7, 50, 400}) {
            const auto w = tps::weights(sched, T);
            REQUIRE(w.size() == T);
            double sum = 0.0;
            for (double v : w) {
                CHECK(v > 0.0);
                sum += v;
            }
            CHECK(std::fabs(sum - 1.0) <= 1e-12);
        }
}

TEST_CASE("closed-form values at small horizons") {
    const auto lf = tps::weights({WeightSchedule::Kind::linear_front}, 4);
    CHECK(lf[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(lf[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(lf[2] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(lf[3] == doctest::Approx(0.1).epsilon(1e-15));

    const auto ef = tps::weights({WeightSchedule::Kind::exponential_front}, 2);
    CHECK(ef[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(ef[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto un = tps::weights({WeightSchedule::Kind::uniform}, 5);
    for (double v : un) CHECK(v == 0.2);

    // Horizon one degenerates to a single unit weight everywhere.
    for (const auto sched : kAll) CHECK(tps::weights(sched, 1)[0] == doctest::Approx(1.0));
}

TEST_CASE("linear-back mirrors linear-front") {
    const auto front = tps::weights({WeightSchedule::Kind::linear_front}, 9);
    const auto back = tps::weights({WeightSchedule::Kind::linear_back}, 9);
    for (std::size_t t = 0; t < 9; ++t) CHECK(front[t] == back[8 - t]);
}

TEST_CASE("exponential-front halves at every step") {
    const auto w = tps::weights({WeightSchedule::Kind::exponential_front}, 12);
    for (std::size_t t = 1; t < 12; ++t)
        CHECK(w[t] == doctest::Approx(w[t - 1] / 2.0).epsilon(1e-15));
}

TEST_CASE("truncation is a bit-identical prefix, never renormalized") {
    for (const auto sched : kAll) {
        const auto full = tps::weights(sched, 17);
        for (std::size_t Z : {1, 5, 16, 17}) {
            const auto cut = tps::truncated_weights(sched, 17, Z);
            REQUIRE(cut.size() == Z);
            for (std::size_t t = 0; t < Z; ++t) CHECK(cut[t] == full[t]);
            const double sum = std::accumulate(cut.begin(), cut.end(), 0.0);
            if (Z < 17)
                CHECK(sum < 1.0);
            else
                CHECK(std::fabs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("name round-trips and input guards") {
    for (const auto sched : kAll)
        CHECK(tps::schedule_from_name(tps::schedule_name(sched.kind)).kind == sched.kind);
    CHECK_THROWS_AS(tps::schedule_from_name("quadratic"), tps::InvalidInput);
    CHECK_THROWS_AS(tps::weights({WeightSchedule::Kind::uniform}, 0), tps::InvalidInput);
    CHECK_THROWS_AS(tps::truncated_weights({WeightSchedule::Kind::uniform}, 5, 0),
                    tps::InvalidInput);
    CHECK_THROWS_AS(tps::truncated_weights({WeightSchedule::Kind::uniform}, 5, 6),
                    tps::InvalidInput);
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tps/jsonl.hpp"
#include "tps/trajectory.hpp"

using tps::StopReason;
using tps::TrajectoryRecord;

namespace {

TrajectoryRecord good_record() {
    TrajectoryRecord rec;
    rec.id = "ep-1";
    rec.horizon_T = 5;
    rec.stop_Z = 3;
    rec.delta = true;
    rec.outcome_Y = 1;
    rec.stop_reason = StopReason::clean;
    rec.streams["conf"] = {0.2, 0.5, 0.9};
    return rec;
}

}  // namespace

TEST_CASE("validate_and_clip accepts a well-formed record unchanged") {
    const auto rec = tps::validate_and_clip(good_record());
    CHECK(rec.streams.at("conf") == std::vector<double>{0.2, 0.5, 0.9});
    CHECK_FALSE(rec.informative_censoring);
    CHECK(rec.is_complete());
}

TEST_CASE("field invariants are enforced with the offending field named") {
    auto bad_horizon = good_record();
    bad_horizon.horizon_T = 0;
    CHECK_THROWS_AS(tps::validate_and_clip(bad_horizon), tps::ValidationError);

    auto bad_stop = good_record();
    bad_stop.stop_Z = 6;
    CHECK_THROWS_AS(tps::validate_and_clip(bad_stop), tps::ValidationError);

    auto missing_outcome = good_record();
    missing_outcome.outcome_Y.reset();
    CHECK_THROWS_AS(tps::validate_and_clip(missing_outcome), tps::ValidationError);

    auto stray_outcome = good_record();
    stray_outcome.delta = false;
    CHECK_THROWS_AS(tps::validate_and_clip(stray_outcome), tps::ValidationError);

    auto bad_outcome = good_record();
    bad_outcome.outcome_Y = 2;
    CHECK_THROWS_AS(tps::validate_and_clip(bad_outcome), tps::ValidationError);

    auto bad_qz = good_record();
    bad_qz.qz_estimate = 1.5;
    CHECK_THROWS_AS(tps::validate_and_clip(bad_qz), tps::ValidationError);

    auto bad_len = good_record();
    bad_len.streams["conf"].push_back(0.5);
    try {
        tps::validate_and_clip(bad_len);
        FAIL("expected ValidationError");
    } catch (const tps::ValidationError& e) {
        CHECK(e.record_id == "ep-1");
        CHECK(e.field == "streams.conf");
    }
}

TEST_CASE("out-of-range stream values are clipped, not rejected") {
    auto rec = good_record();
    rec.streams["conf"] = {1.0, -0.2, 0.5};
    const auto out = tps::validate_and_clip(rec);
    CHECK(out.streams.at("conf")[0] == 1.0 - 1e-6);
    CHECK(out.streams.at("conf")[1] == 1e-6);
    CHECK(out.streams.at("conf")[2] == 0.5);
}

TEST_CASE("a stream containing any non-finite value is dropped whole") {
    auto rec = good_record();
    rec.streams["broken"] = {0.2, std::nan(""), 0.9};
    rec.streams["alsobad"] = {0.2, 0.3, INFINITY};
    const auto out = tps::validate_and_clip(rec);
    CHECK(out.streams.count("conf") == 1);
    CHECK(out.streams.count("broken") == 0);
    CHECK(out.streams.count("alsobad") == 0);
}

TEST_CASE("validation is idempotent") {
    auto rec = good_record();
    rec.streams["conf"] = {1.0, 0.5, -3.0};
    const auto once = tps::validate_and_clip(rec);
    const auto twice = tps::validate_and_clip(once);
    CHECK(once.streams.at("conf") == twice.streams.at("conf"));
    CHECK(once.informative_censoring == twice.informative_censoring);
}

TEST_CASE("informative censoring is flagged by stop reason") {
    auto rec = good_record();
    rec.delta = false;
    rec.outcome_Y.reset();

    rec.stop_reason = StopReason::max_steps;
    CHECK_FALSE(tps::validate_and_clip(rec).informative_censoring);
    CHECK(tps::validate_and_clip(rec).is_admin_censored());

    for (auto reason : {StopReason::parse_error, StopReason::tool_error,
                        StopReason::env_terminated, StopReason::other, StopReason::clean}) {
        rec.stop_reason = reason;
        CHECK(tps::validate_and_clip(rec).informative_censoring);
    }
}

TEST_CASE("stop reason names round-trip") {
    for (auto reason : {StopReason::clean, StopReason::max_steps, StopReason::parse_error,
                        StopReason::tool_error, StopReason::env_terminated, StopReason::other})
        CHECK(tps::stop_reason_from_name(tps::stop_reason_name(reason)) == reason);
    CHECK_THROWS_AS(tps::stop_reason_from_name("abducted"), tps::InvalidInput);
}

TEST_CASE("jsonl round-trip preserves records") {
    std::vector<TrajectoryRecord> records = {good_record()};
    records[0].qz_estimate = 0.4;
    std::ostringstream out;
    tps::write_jsonl(out, records);
    std::istringstream in(out.str());
    const auto back = tps::read_jsonl(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0].id == records[0].id);
    CHECK(back[0].horizon_T == records[0].horizon_T);
    CHECK(back[0].stop_Z == records[0].stop_Z);
    CHECK(back[0].delta == records[0].delta);
    CHECK(back[0].outcome_Y == records[0].outcome_Y);
    CHECK(back[0].qz_estimate == records[0].qz_estimate);
    CHECK(back[0].streams == records[0].streams);
}

TEST_CASE("jsonl reader reports the offending line") {
    std::istringstream in("{\"id\": \"a\"\nnot json");
    CHECK_THROWS_AS(tps::read_jsonl(in), tps::ValidationError);
}

TEST_CASE("non-numeric stream entries poison only their stream") {
    std::istringstream in(
        R"({"id":"x","horizon_T":2,"stop_Z":2,"delta":1,"outcome_Y":0,"stop_reason":"clean",)"
        R"("streams":{"ok":[0.1,0.2],"bad":[0.1,"oops"]}})"
        "\n");
    const auto records = tps::read_jsonl(in);
    REQUIRE(records.size() == 1);
    CHECK(records[0].streams.count("ok") == 1);
    CHECK(records[0].streams.count("bad") == 0);
}

TEST_CASE("blank lines are skipped and unknown keys tolerated") {
    std::istringstream in(
        "\n"
        R"({"id":"x","horizon_T":1,"stop_Z":1,"delta":0,"stop_reason":"max_steps",)"
        R"("streams":{"conf":[0.5]},"surplus":42})"
        "\n\n");
    const auto records = tps::read_jsonl(in);
    REQUIRE(records.size() == 1);
    CHECK(records[0].is_admin_censored());
}

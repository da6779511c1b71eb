#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tps/errors.hpp"
#include "tps/score_family.hpp"

namespace tps {

enum class StopReason { clean, max_steps, parse_error, tool_error, env_terminated, other };

inline const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::clean: return "clean";
        case StopReason::max_steps: return "max_steps";
        case StopReason::parse_error: return "parse_error";
        case StopReason::tool_error: return "tool_error";
        case StopReason::env_terminated: return "env_terminated";
        case StopReason::other: return "other";
    }
    return "?";
}

inline StopReason stop_reason_from_name(const std::string& name) {
    if (name == "clean") return StopReason::clean;
    if (name == "max_steps") return StopReason::max_steps;
    if (name == "parse_error") return StopReason::parse_error;
    if (name == "tool_error") return StopReason::tool_error;
    if (name == "env_terminated") return StopReason::env_terminated;
    if (name == "other") return StopReason::other;
    throw InvalidInput("unknown stop_reason '" + name + "'");
}

// One logged agent episode. `streams` maps predictor name -> per-step
// forecast prefix of length stop_Z. Records with delta=0 and a stop reason
// other than max_steps are informative censoring and are excluded from
// censored scoring unless explicitly overridden.
struct TrajectoryRecord {
    std::string id;
    std::size_t horizon_T = 0;
    std::size_t stop_Z = 0;
    bool delta = false;
    std::optional<int> outcome_Y;
    StopReason stop_reason = StopReason::clean;
    std::map<std::string, std::vector<double>> streams;
    std::optional<double> qz_estimate;
    bool informative_censoring = false;  // set by validate_and_clip

    bool is_complete() const { return delta; }
    bool is_admin_censored() const { return !delta && !informative_censoring; }
};

// Checks the ingestion invariants, clips every stream value, and flags
// informative censoring. Idempotent.
inline TrajectoryRecord validate_and_clip(TrajectoryRecord rec, ClipPolicy policy = {}) {
    if (rec.horizon_T == 0)
        throw ValidationError(rec.id, "horizon_T", "must be a positive integer");
    if (rec.stop_Z == 0 || rec.stop_Z > rec.horizon_T)
        throw ValidationError(rec.id, "stop_Z", "need 1 <= stop_Z <= horizon_T");
    if (rec.delta && !rec.outcome_Y.has_value())
        throw ValidationError(rec.id, "outcome_Y", "required when delta=1");
    if (!rec.delta && rec.outcome_Y.has_value())
        throw ValidationError(rec.id, "outcome_Y", "must be absent when delta=0");
    if (rec.outcome_Y && *rec.outcome_Y != 0 && *rec.outcome_Y != 1)
        throw ValidationError(rec.id, "outcome_Y", "must be 0 or 1");
    if (rec.qz_estimate && !(*rec.qz_estimate >= 0.0 && *rec.qz_estimate <= 1.0))
        throw ValidationError(rec.id, "qz_estimate", "must lie in [0, 1]");
    // Missing-value rule: a stream with any non-numeric value is skipped for
    // this record, never partially scored. In-range checks reduce to the clip.
    for (auto it = rec.streams.begin(); it != rec.streams.end();) {
        auto& [name, stream] = *it;
        if (stream.size() != rec.stop_Z)
            throw ValidationError(rec.id, "streams." + name,
                                  "length must equal stop_Z");
        bool numeric = true;
        for (double v : stream)
            if (!std::isfinite(v)) numeric = false;
        if (!numeric) {
            it = rec.streams.erase(it);
            continue;
        }
        for (double& v : stream) v = clip_probability(v, policy);
        ++it;
    }
    rec.informative_censoring = !rec.delta && rec.stop_reason != StopReason::max_steps;
    return rec;
}

}  // namespace tps

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tps/errors.hpp"

namespace tps {

// Exogenous positive per-step weight rules over a horizon T. All schedules
// sum to 1 over the full horizon; censored prefixes truncate without
// renormalizing.
struct WeightSchedule {
    enum class Kind { linear_front, uniform, exponential_front, linear_back };
    Kind kind = Kind::linear_front;
};

inline const char* schedule_name(WeightSchedule::Kind k) {
    switch (k) {
        case WeightSchedule::Kind::linear_front: return "linear-front";
        case WeightSchedule::Kind::uniform: return "uniform";
        case WeightSchedule::Kind::exponential_front: return "exponential-front";
        case WeightSchedule::Kind::linear_back: return "linear-back";
    }
    return "?";
}

inline WeightSchedule schedule_from_name(const std::string& name) {
    if (name == "linear-front") return {WeightSchedule::Kind::linear_front};
    if (name == "uniform") return {WeightSchedule::Kind::uniform};
    if (name == "exponential-front") return {WeightSchedule::Kind::exponential_front};
    if (name == "linear-back") return {WeightSchedule::Kind::linear_back};
    throw InvalidInput("unknown weight schedule '" + name + "'");
}

inline std::vector<double> weights(WeightSchedule schedule, std::size_t T) {
    if (T == 0) throw InvalidInput("weights: horizon must be >= 1");
    std::vector<double> w(T);
    const double Td = static_cast<double>(T);
    switch (schedule.kind) {
        case WeightSchedule::Kind::linear_front:
            for (std::size_t t = 1; t <= T; ++t)
                w[t - 1] = 2.0 * (Td - static_cast<double>(t) + 1.0) / (Td * (Td + 1.0));
            break;
        case WeightSchedule::Kind::uniform:
            for (std::size_t t = 0; t < T; ++t) w[t] = 1.0 / Td;
            break;
        case WeightSchedule::Kind::exponential_front: {
            // w_t = 2^{-(t-1)} / (2 (1 - 2^{-T}))
            const double norm = 2.0 * (1.0 - std::exp2(-Td));
            double raw = 1.0;
            for (std::size_t t = 0; t < T; ++t, raw *= 0.5) w[t] = raw / norm;
            break;
        }
        case WeightSchedule::Kind::linear_back:
            for (std::size_t t = 1; t <= T; ++t)
                w[t - 1] = 2.0 * static_cast<double>(t) / (Td * (Td + 1.0));
            break;
    }
    return w;
}

// First Z entries of the full-horizon schedule, bit-for-bit. Sum <= 1 with
// equality iff Z == T.
inline std::vector<double> truncated_weights(WeightSchedule schedule, std::size_t T, std::size_t Z) {
    if (Z == 0 || Z > T) throw InvalidInput("truncated_weights: need 1 <= Z <= T");
    std::vector<double> w = weights(schedule, T);
    w.resize(Z);
    return w;
}

}  // namespace tps

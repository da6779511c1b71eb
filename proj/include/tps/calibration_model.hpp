#pragma once

#include <cmath>

#include "tps/errors.hpp"
#include "tps/score_family.hpp"
#include "tps/weights.hpp"

namespace tps {

inline double logit(double p) { return std::log(p / (1.0 - p)); }
inline double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Fitted Platt map: p_cal = sigmoid(a + b * (logit(clip(F)) - mu) / sigma).
// slope_b >= 0 always; the fallback model is the constant train base rate.
struct PlattModel {
    double intercept_a = 0.0;
    double slope_b = 0.0;
    double mu_train = 0.0;
    double sigma_train = 1.0;  // floored at 1e-6
    bool fallback_triggered = false;
    double train_base_rate = 0.5;
    WeightSchedule schedule;  // fitting weights; application must match
};

inline double apply_platt(const PlattModel& model, double raw) {
    if (!(raw >= 0.0 && raw <= 1.0)) throw InvalidInput("apply_platt: input outside [0, 1]");
    const ClipPolicy clip{1e-6};
    const double x = (logit(clip_probability(raw, clip)) - model.mu_train) / model.sigma_train;
    const double p = sigmoid(model.intercept_a + model.slope_b * x);
    return clip_probability(p, clip);
}

// Evaluation-time application: the calibrator is only valid under the weight
// schedule it was fitted with, so a mismatch is refused rather than silently
// reused.
inline double apply_platt(const PlattModel& model, double raw, WeightSchedule evaluation) {
    if (model.schedule.kind != evaluation.kind)
        throw WrongMode("apply_platt: model was fitted under schedule '" +
                        std::string(schedule_name(model.schedule.kind)) +
                        "', refusing to apply under '" +
                        std::string(schedule_name(evaluation.kind)) + "'");
    return apply_platt(model, raw);
}

}  // namespace tps

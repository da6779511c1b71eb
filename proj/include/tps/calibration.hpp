#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <string>
#include <vector>

#include "tps/calibration_model.hpp"
#include "tps/errors.hpp"
#include "tps/trajectory.hpp"
#include "tps/weights.hpp"

namespace tps {

// Single-split cross-fitted Platt recalibration of per-step forecast
// streams. Trajectory-level 50/50 split stratified by outcome; each half is
// calibrated by the model fitted on the other half.

struct SplitAssignment {
    std::vector<std::size_t> half_a;  // indices into the input record span
    std::vector<std::size_t> half_b;
};

// Within each label class, records sorted by id and alternated between
// halves. Deterministic: reordering the input does not change the split.
inline SplitAssignment stratified_split(const std::vector<TrajectoryRecord>& records) {
    SplitAssignment split;
    for (int label : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < records.size(); ++i)
            if (records[i].delta && records[i].outcome_Y && *records[i].outcome_Y == label)
                idx.push_back(i);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return records[a].id < records[b].id;
        });
        if (idx.size() == 1)
            std::cerr << "warning: degenerate split, single record with label " << label << "\n";
        for (std::size_t k = 0; k < idx.size(); ++k)
            (k % 2 == 0 ? split.half_a : split.half_b).push_back(idx[k]);
    }
    return split;
}

namespace detail {

struct PlattRow {
    double x_raw;  // logit of the clipped forecast
    int y;
    double w;  // truncated schedule weight, not renormalized
};

inline std::vector<PlattRow> platt_rows(const std::vector<TrajectoryRecord>& records,
                                        const std::vector<std::size_t>& idx,
                                        const std::string& stream_name, WeightSchedule schedule) {
    const ClipPolicy clip{1e-6};
    std::vector<PlattRow> rows;
    for (std::size_t i : idx) {
        const auto& rec = records[i];
        auto it = rec.streams.find(stream_name);
        if (it == rec.streams.end()) continue;
        const auto w = truncated_weights(schedule, rec.horizon_T, rec.stop_Z);
        for (std::size_t t = 0; t < it->second.size(); ++t)
            rows.push_back({logit(clip_probability(it->second[t], clip)), *rec.outcome_Y, w[t]});
    }
    return rows;
}

struct PenalizedFit {
    double a = 0.0, b = 0.0;
    bool converged = false;
};

// Damped Newton on the penalized weighted log-likelihood
// sum_i w_i [y_i log p_i + (1-y_i) log(1-p_i)] - lambda b^2 / 2.
inline PenalizedFit fit_logistic(const std::vector<PlattRow>& rows,
                                 const std::vector<double>& x, double lambda) {
    auto loglik = [&](double a, double b) {
        double ll = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double u = a + b * x[i];
            // log p = -log(1+e^{-u}), log(1-p) = -log(1+e^{u})
            ll += rows[i].w * (rows[i].y == 1 ? -std::log1p(std::exp(-u))
                                              : -std::log1p(std::exp(u)));
        }
        return ll - 0.5 * lambda * b * b;
    };
    PenalizedFit fit;
    double a = 0.0, b = 0.0, ll = loglik(a, b);
    for (int iter = 0; iter < 200; ++iter) {
        double ga = 0.0, gb = 0.0, haa = 0.0, hab = 0.0, hbb = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double p = sigmoid(a + b * x[i]);
            const double r = rows[i].w * (rows[i].y - p);
            const double v = rows[i].w * p * (1.0 - p);
            ga += r;
            gb += r * x[i];
            haa += v;
            hab += v * x[i];
            hbb += v * x[i] * x[i];
        }
        gb -= lambda * b;
        hbb += lambda;
        if (std::hypot(ga, gb) <= 1e-10) {
            fit.converged = true;
            break;
        }
        const double det = haa * hbb - hab * hab;
        double da, db;
        if (det > 1e-300) {
            da = (hbb * ga - hab * gb) / det;
            db = (haa * gb - hab * ga) / det;
        } else {
            da = ga;
            db = gb;
        }
        double step = 1.0;
        while (step > 1e-12 && loglik(a + step * da, b + step * db) < ll) step *= 0.5;
        a += step * da;
        b += step * db;
        ll = loglik(a, b);
    }
    fit.a = a;
    fit.b = b;
    return fit;
}

// Slope bisection used only if Newton fails to converge: profiles out the
// intercept at each slope and bisects the penalized slope gradient.
inline PenalizedFit fit_logistic_bisect(const std::vector<PlattRow>& rows,
                                        const std::vector<double>& x, double lambda) {
    auto profile = [&](double b, double& a_out) {
        double a = 0.0;
        for (int it = 0; it < 100; ++it) {
            double g = 0.0, h = 0.0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const double p = sigmoid(a + b * x[i]);
                g += rows[i].w * (rows[i].y - p);
                h += rows[i].w * p * (1.0 - p);
            }
            if (std::fabs(g) <= 1e-12 || h <= 1e-300) break;
            a += g / h;
        }
        a_out = a;
        double gb = -lambda * b;
        for (std::size_t i = 0; i < rows.size(); ++i)
            gb += rows[i].w * (rows[i].y - sigmoid(a + b * x[i])) * x[i];
        return gb;
    };
    double lo = -64.0, hi = 64.0, a_lo, a_hi;
    const double g_lo = profile(lo, a_lo), g_hi = profile(hi, a_hi);
    PenalizedFit fit;
    if (g_lo < 0.0) {
        fit.a = a_lo;
        fit.b = lo;
        return fit;
    }
    if (g_hi > 0.0) {
        fit.a = a_hi;
        fit.b = hi;
        return fit;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double a_mid;
        (profile(mid, a_mid) > 0.0 ? lo : hi) = mid;
    }
    fit.b = 0.5 * (lo + hi);
    profile(fit.b, fit.a);
    fit.converged = true;
    return fit;
}

}  // namespace detail

inline PlattModel fit_platt(const std::vector<TrajectoryRecord>& records,
                            const std::vector<std::size_t>& train_idx,
                            const std::string& stream_name, WeightSchedule schedule,
                            double lambda = 1.0) {
    const ClipPolicy clip{1e-6};
    auto rows = detail::platt_rows(records, train_idx, stream_name, schedule);
    if (rows.empty()) throw InvalidInput("fit_platt: no training rows for stream '" + stream_name + "'");

    PlattModel model;
    model.schedule = schedule;
    double w_sum = 0.0, y_sum = 0.0;
    for (const auto& r : rows) {
        w_sum += r.w;
        y_sum += r.w * r.y;
    }
    model.train_base_rate = y_sum / w_sum;

    auto fallback = [&] {
        model.slope_b = 0.0;
        model.intercept_a = logit(clip_probability(model.train_base_rate, clip));
        model.mu_train = 0.0;
        model.sigma_train = 1.0;
        model.fallback_triggered = true;
        return model;
    };
    const bool has_pos = std::any_of(rows.begin(), rows.end(), [](auto& r) { return r.y == 1; });
    const bool has_neg = std::any_of(rows.begin(), rows.end(), [](auto& r) { return r.y == 0; });
    if (!has_pos || !has_neg) return fallback();

    // Weighted standardization of the logit feature (biased std, floored).
    double mu = 0.0;
    for (const auto& r : rows) mu += r.w * r.x_raw;
    mu /= w_sum;
    double var = 0.0;
    for (const auto& r : rows) var += r.w * (r.x_raw - mu) * (r.x_raw - mu);
    var /= w_sum;
    model.mu_train = mu;
    model.sigma_train = std::max(std::sqrt(var), 1e-6);

    std::vector<double> x(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        x[i] = (rows[i].x_raw - mu) / model.sigma_train;

    auto fit = detail::fit_logistic(rows, x, lambda);
    if (!fit.converged) fit = detail::fit_logistic_bisect(rows, x, lambda);
    if (fit.b < 0.0) return fallback();
    model.intercept_a = fit.a;
    model.slope_b = fit.b;
    return model;
}

struct CrossFitResult {
    std::vector<TrajectoryRecord> records;  // input plus "<name>.platt" streams
    PlattModel model_a;                     // fitted on half A, applied to half B
    PlattModel model_b;
    SplitAssignment split;
};

// Cross-fits one stream: each complete record is calibrated by the model
// fitted on the opposite half. Censored records (outcome unavailable, so
// never part of a training split) alternate halves by sorted id and are
// calibrated the same held-out way.
inline CrossFitResult cross_fit(std::vector<TrajectoryRecord> records,
                                const std::string& stream_name, WeightSchedule schedule,
                                double lambda = 1.0) {
    CrossFitResult out;
    out.split = stratified_split(records);
    out.model_a = fit_platt(records, out.split.half_a, stream_name, schedule, lambda);
    out.model_b = fit_platt(records, out.split.half_b, stream_name, schedule, lambda);

    std::vector<int> half(records.size(), -1);  // 0 = A, 1 = B
    for (std::size_t i : out.split.half_a) half[i] = 0;
    for (std::size_t i : out.split.half_b) half[i] = 1;
    {
        std::vector<std::size_t> censored;
        for (std::size_t i = 0; i < records.size(); ++i)
            if (half[i] < 0 && records[i].streams.count(stream_name)) censored.push_back(i);
        std::sort(censored.begin(), censored.end(),
                  [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });
        for (std::size_t k = 0; k < censored.size(); ++k) half[censored[k]] = static_cast<int>(k % 2);
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto it = records[i].streams.find(stream_name);
        if (it == records[i].streams.end() || half[i] < 0) continue;
        const PlattModel& model = (half[i] == 0) ? out.model_b : out.model_a;
        std::vector<double> cal;
        cal.reserve(it->second.size());
        for (double v : it->second) cal.push_back(apply_platt(model, v));
        records[i].streams[stream_name + ".platt"] = std::move(cal);
    }
    out.records = std::move(records);
    return out;
}

// Diagnostics mirroring the calibration report: per-split slopes, fallback
// flags, probe mappings, and the calibrated output range.
struct PlattDiagnostics {
    double slope_a, slope_b;
    bool fallback_a, fallback_b;
    std::array<double, 3> probe_inputs{0.90, 0.95, 1.00};
    std::array<double, 3> probe_mapped_a{}, probe_mapped_b{};
    double range_low = 1.0, range_high = 0.0;
};

inline PlattDiagnostics platt_diagnostics(const CrossFitResult& fit,
                                          const std::string& stream_name) {
    PlattDiagnostics d{};
    d.slope_a = fit.model_a.slope_b;
    d.slope_b = fit.model_b.slope_b;
    d.fallback_a = fit.model_a.fallback_triggered;
    d.fallback_b = fit.model_b.fallback_triggered;
    d.probe_inputs = {0.90, 0.95, 1.00};
    for (std::size_t k = 0; k < 3; ++k) {
        d.probe_mapped_a[k] = apply_platt(fit.model_a, d.probe_inputs[k]);
        d.probe_mapped_b[k] = apply_platt(fit.model_b, d.probe_inputs[k]);
    }
    const std::string cal_name = stream_name + ".platt";
    for (const auto& rec : fit.records) {
        auto it = rec.streams.find(cal_name);
        if (it == rec.streams.end()) continue;
        for (double v : it->second) {
            d.range_low = std::min(d.range_low, v);
            d.range_high = std::max(d.range_high, v);
        }
    }
    return d;
}

}  // namespace tps

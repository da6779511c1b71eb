#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tps/errors.hpp"
#include "tps/score_family.hpp"
#include "tps/trajectory.hpp"
#include "tps/weights.hpp"

namespace tps {

// Neumaier-compensated accumulator. Keeps the 1e-12 identity budgets honest
// at horizons of a few hundred steps.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

enum class ScoreMode { complete, cen_simple, cen_exact };

inline const char* score_mode_name(ScoreMode m) {
    switch (m) {
        case ScoreMode::complete: return "complete";
        case ScoreMode::cen_simple: return "cen-simple";
        case ScoreMode::cen_exact: return "cen-exact";
    }
    return "?";
}

struct StepContribution {
    std::size_t step;  // 1-based
    double weight;
    double score;  // weight already applied
};

struct ScoredResult {
    std::string record_id;
    ScoreMode mode = ScoreMode::complete;
    double total = 0.0;
    std::vector<StepContribution> per_step;
    std::optional<double> branch_weight_used;  // q_Z, cen_exact on delta=0 only
};

namespace detail {

inline void check_lengths(std::span<const double> stream, std::span<const double> w) {
    if (stream.size() != w.size())
        throw InvalidInput("tps: stream length does not match weight length");
    if (stream.empty()) throw InvalidInput("tps: empty stream");
}

}  // namespace detail

// Complete-observation trajectory score: sum_t w_t S(F_t, Y).
inline ScoredResult tps_complete(std::span<const double> stream, int outcome,
                                 std::span<const double> w, const ScoreFamily& fam,
                                 std::string record_id = {}) {
    detail::check_lengths(stream, w);
    ScoredResult res;
    res.record_id = std::move(record_id);
    res.mode = ScoreMode::complete;
    res.per_step.reserve(stream.size());
    CompensatedSum acc;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        const double s = w[t] * binary_score(fam, stream[t], outcome);
        res.per_step.push_back({t + 1, w[t], s});
        acc.add(s);
    }
    res.total = acc.value();
    return res;
}

// Simple censored score: observed outcome branch when delta=1, failure
// branch on the censored prefix otherwise (the q_Z ~ 0 approximation).
inline ScoredResult tps_cen_simple(std::span<const double> stream, bool delta,
                                   std::optional<int> outcome, std::span<const double> w,
                                   const ScoreFamily& fam, std::string record_id = {}) {
    detail::check_lengths(stream, w);
    if (delta && !outcome) throw WrongMode("tps_cen_simple: delta=1 requires an outcome");
    ScoredResult res;
    res.record_id = std::move(record_id);
    res.mode = ScoreMode::cen_simple;
    res.per_step.reserve(stream.size());
    const int label = delta ? *outcome : 0;
    CompensatedSum acc;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        const double s = w[t] * binary_score(fam, stream[t], label);
        res.per_step.push_back({t + 1, w[t], s});
        acc.add(s);
    }
    res.total = acc.value();
    return res;
}

// Exact reduced censored score: the censored branch mixes the two outcome
// branches with the continuation-success weight q_Z.
inline ScoredResult tps_cen_exact(std::span<const double> stream, bool delta,
                                  std::optional<int> outcome, std::optional<double> q_z,
                                  std::span<const double> w, const ScoreFamily& fam,
                                  std::string record_id = {}) {
    detail::check_lengths(stream, w);
    if (delta) {
        if (!outcome) throw WrongMode("tps_cen_exact: delta=1 requires an outcome");
        ScoredResult res = tps_complete(stream, *outcome, w, fam, std::move(record_id));
        res.mode = ScoreMode::cen_exact;
        return res;
    }
    if (!q_z)
        throw MissingNuisance(
            "tps_cen_exact: delta=0 requires q_Z; use tps_cen_simple when it is unavailable");
    if (!(*q_z >= 0.0 && *q_z <= 1.0)) throw InvalidInput("tps_cen_exact: q_Z outside [0, 1]");
    ScoredResult res;
    res.record_id = std::move(record_id);
    res.mode = ScoreMode::cen_exact;
    res.branch_weight_used = *q_z;
    res.per_step.reserve(stream.size());
    CompensatedSum acc;
    for (std::size_t t = 0; t < stream.size(); ++t) {
        const double mix = *q_z * binary_score(fam, stream[t], 1) +
                           (1.0 - *q_z) * binary_score(fam, stream[t], 0);
        const double s = w[t] * mix;
        res.per_step.push_back({t + 1, w[t], s});
        acc.add(s);
    }
    res.total = acc.value();
    return res;
}

// Closed-form exact-minus-simple correction for the log family:
// q_Z * sum_t w_t log(F_t / (1-F_t)).
inline double delta_exact_minus_simple_log(std::span<const double> stream,
                                           std::span<const double> w, double q_z) {
    detail::check_lengths(stream, w);
    if (!(q_z >= 0.0 && q_z <= 1.0))
        throw InvalidInput("delta_exact_minus_simple_log: q_Z outside [0, 1]");
    CompensatedSum acc;
    for (std::size_t t = 0; t < stream.size(); ++t)
        acc.add(w[t] * (std::log(stream[t]) - std::log1p(-stream[t])));
    return q_z * acc.value();
}

struct CensoringShift {
    double prefix_swap;    // zero when Y = 0
    double tail_omission;  // always >= 0
};

// Decomposes cen_simple(cut at Z) - complete(full) for a complete record
// artificially cut at Z < T.
inline CensoringShift decompose_censoring_shift(std::span<const double> full_stream, int outcome,
                                                std::size_t cut_Z, std::span<const double> w,
                                                const ScoreFamily& fam) {
    detail::check_lengths(full_stream, w);
    if (cut_Z == 0 || cut_Z >= full_stream.size())
        throw InvalidInput("decompose_censoring_shift: cut must satisfy 1 <= Z < T");
    CompensatedSum swap, tail;
    for (std::size_t t = 0; t < cut_Z; ++t)
        swap.add(w[t] * (binary_score(fam, full_stream[t], 0) -
                         binary_score(fam, full_stream[t], outcome)));
    for (std::size_t t = cut_Z; t < full_stream.size(); ++t)
        tail.add(-w[t] * binary_score(fam, full_stream[t], outcome));
    return {outcome == 0 ? 0.0 : swap.value(), tail.value()};
}

struct PopulationSummary {
    double mean = 0.0;
    std::size_t n = 0;
};

inline PopulationSummary population_summary(std::span<const ScoredResult> results) {
    if (results.empty()) throw EmptyPopulation("population_summary: empty result set");
    CompensatedSum acc;
    for (const auto& r : results) acc.add(r.total);
    return {acc.value() / static_cast<double>(results.size()), results.size()};
}

// Delta_practice: censored-extension mean over the union population minus
// the complete-only mean.
inline double delta_practice(std::span<const ScoredResult> censored_ext_union,
                             std::span<const ScoredResult> complete_only) {
    return population_summary(censored_ext_union).mean - population_summary(complete_only).mean;
}

}  // namespace tps

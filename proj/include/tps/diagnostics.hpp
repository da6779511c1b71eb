#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tps/calibration_model.hpp"
#include "tps/errors.hpp"
#include "tps/weights.hpp"

namespace tps {

// Deterministic collapse of a forecast trace to one scalar.
struct Aggregator {
    enum class Kind { last, avg, min, weighted };
    Kind kind = Kind::last;
    std::vector<double> weights;  // kind == weighted only

    static Aggregator last() { return {Kind::last, {}}; }
    static Aggregator avg() { return {Kind::avg, {}}; }
    static Aggregator min() { return {Kind::min, {}}; }
    static Aggregator weighted(std::vector<double> w) {
        std::size_t positive = 0;
        for (double v : w) {
            if (v < 0.0) throw InvalidInput("Aggregator: weights must be nonnegative");
            if (v > 0.0) ++positive;
        }
        if (positive < 2)
            throw InvalidInput("Aggregator: weighted kind needs at least two positive weights");
        return {Kind::weighted, std::move(w)};
    }
};

inline double aggregate(std::span<const double> stream, const Aggregator& agg) {
    if (stream.empty()) throw InvalidInput("aggregate: empty stream");
    switch (agg.kind) {
        case Aggregator::Kind::last:
            return stream.back();
        case Aggregator::Kind::avg:
            return std::accumulate(stream.begin(), stream.end(), 0.0) /
                   static_cast<double>(stream.size());
        case Aggregator::Kind::min:
            return *std::min_element(stream.begin(), stream.end());
        case Aggregator::Kind::weighted: {
            if (agg.weights.size() != stream.size())
                throw InvalidInput("aggregate: weight length mismatch");
            double acc = 0.0;
            for (std::size_t t = 0; t < stream.size(); ++t) acc += agg.weights[t] * stream[t];
            return acc;
        }
    }
    throw InvalidInput("aggregate: bad aggregator kind");
}

// Default scalar summary: truncated schedule weights renormalized to sum 1
// over the observed prefix.
inline double front_weighted_summary(std::span<const double> stream, WeightSchedule schedule,
                                     std::size_t horizon_T) {
    if (stream.empty()) throw InvalidInput("front_weighted_summary: empty stream");
    std::vector<double> w = truncated_weights(schedule, horizon_T, stream.size());
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double acc = 0.0;
    for (std::size_t t = 0; t < stream.size(); ++t) acc += (w[t] / total) * stream[t];
    return acc;
}

// One trajectory collapsed for the scalar diagnostics. Labels are required:
// these metrics have no native value for unobserved outcomes.
struct ScalarSummary {
    std::string record_id;
    double confidence = 0.0;
    int label = 0;
};

namespace detail {

// Canonical order for tie handling: stable sort by id, then stable sort by
// confidence. Ties end up in id order.
inline std::vector<ScalarSummary> sorted_by_confidence(std::span<const ScalarSummary> in,
                                                       bool descending) {
    std::vector<ScalarSummary> v(in.begin(), in.end());
    std::stable_sort(v.begin(), v.end(),
                     [](const auto& a, const auto& b) { return a.record_id < b.record_id; });
    std::stable_sort(v.begin(), v.end(), [descending](const auto& a, const auto& b) {
        return descending ? a.confidence > b.confidence : a.confidence < b.confidence;
    });
    return v;
}

}  // namespace detail

// Failure-oriented AUROC: probability that a random failure (Y=0) carries
// strictly higher risk (1 - confidence) than a random success, plus half
// the tie probability.
inline double auroc_failure(std::span<const ScalarSummary> summaries) {
    std::size_t n_fail = 0, n_succ = 0;
    for (const auto& s : summaries) (s.label == 0 ? n_fail : n_succ)++;
    if (n_fail == 0 || n_succ == 0)
        throw UndefinedMetric("auroc_failure: both classes must be present");
    // Rank-sum over risk with midranks for ties; risk order = ascending confidence.
    auto v = detail::sorted_by_confidence(summaries, /*descending=*/true);
    double rank_sum_fail = 0.0;  // ranks in ascending-risk order
    std::size_t i = 0;
    const std::size_t n = v.size();
    while (i < n) {
        std::size_t j = i;
        while (j < n && v[j].confidence == v[i].confidence) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (v[k].label == 0) rank_sum_fail += midrank;
        i = j;
    }
    const double nf = static_cast<double>(n_fail), ns = static_cast<double>(n_succ);
    // U counts (failure, success) pairs where the failure has higher risk,
    // with half credit for ties.
    const double u_high_risk = rank_sum_fail - nf * (nf + 1.0) / 2.0;
    return u_high_risk / (nf * ns);
}

// Average precision over the risk ranking, positive class Y=0. Tied-score
// blocks contribute the even-spread precision average, which makes the
// all-ties value equal the failure prevalence exactly.
inline double auprc_failure(std::span<const ScalarSummary> summaries) {
    std::size_t n_fail = 0;
    for (const auto& s : summaries) n_fail += (s.label == 0);
    if (n_fail == 0) throw UndefinedMetric("auprc_failure: no failures present");
    auto v = detail::sorted_by_confidence(summaries, /*descending=*/false);  // risk descending
    const std::size_t n = v.size();
    double acc = 0.0;
    std::size_t seen = 0, tp = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::size_t block_pos = 0;
        while (j < n && v[j].confidence == v[i].confidence) {
            block_pos += (v[j].label == 0);
            ++j;
        }
        const std::size_t block_n = j - i;
        if (block_pos > 0) {
            const double rate = static_cast<double>(block_pos) / static_cast<double>(block_n);
            for (std::size_t k = 1; k <= block_n; ++k)
                acc += rate * (static_cast<double>(tp) + rate * static_cast<double>(k)) /
                       static_cast<double>(seen + k);
        }
        tp += block_pos;
        seen += block_n;
        i = j;
    }
    return acc / static_cast<double>(n_fail);
}

// Risk-coverage area: mean over coverages k/n of the error rate among the k
// most-confident records. Lower is better.
inline double aurc(std::span<const ScalarSummary> summaries) {
    if (summaries.empty()) throw EmptyPopulation("aurc: empty input");
    auto v = detail::sorted_by_confidence(summaries, /*descending=*/true);
    double acc = 0.0;
    std::size_t errors = 0;
    for (std::size_t k = 1; k <= v.size(); ++k) {
        errors += (v[k - 1].label == 0);
        acc += static_cast<double>(errors) / static_cast<double>(k);
    }
    return acc / static_cast<double>(v.size());
}

// Tie-aware quantile-binned trajectory calibration error. Bin edges move to
// the next distinct confidence value so tied values never straddle a bin.
inline double t_ece(std::span<const ScalarSummary> summaries, std::size_t bins = 10) {
    if (summaries.empty()) throw EmptyPopulation("t_ece: empty input");
    if (bins == 0) throw InvalidInput("t_ece: bins must be >= 1");
    auto v = detail::sorted_by_confidence(summaries, /*descending=*/false);
    const std::size_t n = v.size();
    double acc = 0.0;
    std::size_t start = 0;
    for (std::size_t k = 1; k <= bins && start < n; ++k) {
        std::size_t end = (k == bins) ? n : (n * k) / bins;
        if (end <= start) end = start + 1;
        // Tie-aware edge: extend past any run of equal confidences.
        while (end < n && v[end].confidence == v[end - 1].confidence) ++end;
        double conf = 0.0, lab = 0.0;
        for (std::size_t i = start; i < end; ++i) {
            conf += v[i].confidence;
            lab += v[i].label;
        }
        const double m = static_cast<double>(end - start);
        acc += (m / static_cast<double>(n)) * std::fabs(lab / m - conf / m);
        start = end;
    }
    return acc;
}

// Scalarized trajectory Brier: mean squared confidence-label gap.
inline double t_brier(std::span<const ScalarSummary> summaries) {
    if (summaries.empty()) throw EmptyPopulation("t_brier: empty input");
    double acc = 0.0;
    for (const auto& s : summaries) {
        const double d = s.confidence - static_cast<double>(s.label);
        acc += d * d;
    }
    return acc / static_cast<double>(summaries.size());
}

// Probability-scale distortions for the fixed-rank sensitivity check.
enum class RankTransform { identity, affine_compress, sqrt_map, square, platt_model };

inline std::vector<double> fixed_rank_transform(std::span<const double> stream,
                                                RankTransform kind,
                                                const PlattModel* model = nullptr) {
    std::vector<double> out;
    out.reserve(stream.size());
    for (double v : stream) {
        switch (kind) {
            case RankTransform::identity: out.push_back(v); break;
            case RankTransform::affine_compress: out.push_back(0.4 + 0.2 * v); break;
            case RankTransform::sqrt_map: out.push_back(std::sqrt(v)); break;
            case RankTransform::square: out.push_back(v * v); break;
            case RankTransform::platt_model:
                if (!model)
                    throw InvalidInput("fixed_rank_transform: platt_model needs a fitted model");
                out.push_back(apply_platt(*model, v));
                break;
        }
    }
    return out;
}

}  // namespace tps

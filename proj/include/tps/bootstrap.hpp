#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tps/errors.hpp"
#include "tps/rng.hpp"

namespace tps {

// Paired trajectory-level bootstrap. Every replicate derives its generator
// from (seed, replicate index), so results never depend on evaluation order.

struct BootstrapSummary {
    double estimate = 0.0;
    double se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;

    // The change-over-noise ratio; +-inf when se is exactly zero.
    double t_ratio() const { return estimate / se; }
};

namespace detail {

// Percentile endpoint by inclusive linear interpolation: rank = 1 + (B-1) p
// over the sorted replicate values (1-based).
inline double percentile(const std::vector<double>& sorted, double p) {
    const std::size_t B = sorted.size();
    if (B == 1) return sorted[0];
    const double rank = 1.0 + static_cast<double>(B - 1) * p;
    const double lo = std::floor(rank);
    auto i = static_cast<std::size_t>(lo) - 1;
    if (i + 1 >= B) return sorted[B - 1];
    return sorted[i] + (rank - lo) * (sorted[i + 1] - sorted[i]);
}

inline BootstrapSummary summarize(double estimate, std::vector<double> reps, double level,
                                  std::uint64_t seed) {
    BootstrapSummary out;
    out.estimate = estimate;
    out.replicates = reps.size();
    out.seed = seed;
    double mean = 0.0;
    for (double v : reps) mean += v;
    mean /= static_cast<double>(reps.size());
    if (reps.size() > 1) {
        double ss = 0.0;
        for (double v : reps) ss += (v - mean) * (v - mean);
        out.se = std::sqrt(ss / static_cast<double>(reps.size() - 1));
    }
    std::sort(reps.begin(), reps.end());
    const double tail = (1.0 - level) / 2.0;
    out.ci_low = percentile(reps, tail);
    out.ci_high = percentile(reps, 1.0 - tail);
    return out;
}

inline void check_args(std::size_t n, std::size_t B, double level) {
    if (n == 0) throw EmptyPopulation("bootstrap: empty input");
    if (B == 0) throw InvalidInput("bootstrap: need at least one replicate");
    if (!(level > 0.0 && level < 1.0)) throw InvalidInput("bootstrap: level must be in (0, 1)");
}

}  // namespace detail

inline BootstrapSummary bootstrap_mean(std::span<const double> values, std::size_t B = 1000,
                                       double level = 0.95, std::uint64_t seed = 42) {
    detail::check_args(values.size(), B, level);
    const std::size_t n = values.size();
    double full = 0.0;
    for (double v : values) full += v;
    full /= static_cast<double>(n);
    std::vector<double> reps(B);
    for (std::size_t rep = 0; rep < B; ++rep) {
        SplitMix64 rng = substream(seed, rep);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += values[rng.next_below(n)];
        reps[rep] = acc / static_cast<double>(n);
    }
    return detail::summarize(full, std::move(reps), level, seed);
}

// Mean of a - b with indices resampled once per replicate and applied to
// both columns, so column noise cancels in the difference.
inline BootstrapSummary bootstrap_paired_diff(std::span<const double> values_a,
                                              std::span<const double> values_b,
                                              std::size_t B = 1000, double level = 0.95,
                                              std::uint64_t seed = 42) {
    if (values_a.size() != values_b.size())
        throw InvalidInput("bootstrap_paired_diff: columns must be aligned");
    detail::check_args(values_a.size(), B, level);
    const std::size_t n = values_a.size();
    std::vector<double> diff(n);
    double full = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diff[i] = values_a[i] - values_b[i];
        full += diff[i];
    }
    full /= static_cast<double>(n);
    std::vector<double> reps(B);
    for (std::size_t rep = 0; rep < B; ++rep) {
        SplitMix64 rng = substream(seed, rep);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += diff[rng.next_below(n)];
        reps[rep] = acc / static_cast<double>(n);
    }
    return detail::summarize(full, std::move(reps), level, seed);
}

// Bootstrap of the censored-extension-minus-complete-only mean gap over the
// union population. Each replicate resamples union members; the complete-only
// mean uses whichever complete members landed in the resample, and replicates
// that draw none are redrawn (counted, capped at 10 B total).
inline BootstrapSummary bootstrap_union_delta_practice(std::span<const double> complete_scores,
                                                       std::span<const double> censored_scores,
                                                       std::size_t B = 1000, double level = 0.95,
                                                       std::uint64_t seed = 42) {
    const std::size_t nc = complete_scores.size();
    if (nc == 0) throw EmptyPopulation("bootstrap_union_delta_practice: no complete trajectories");
    const std::size_t n = nc + censored_scores.size();
    detail::check_args(n, B, level);
    auto value_at = [&](std::size_t i) {
        return i < nc ? complete_scores[i] : censored_scores[i - nc];
    };
    double union_mean = 0.0, complete_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) union_mean += value_at(i);
    union_mean /= static_cast<double>(n);
    for (double v : complete_scores) complete_mean += v;
    complete_mean /= static_cast<double>(nc);

    std::vector<double> reps(B);
    std::size_t redraws = 0;
    const std::size_t redraw_cap = 10 * B;
    for (std::size_t rep = 0; rep < B; ++rep) {
        SplitMix64 rng = substream(seed, rep);
        for (;;) {
            double acc_union = 0.0, acc_complete = 0.0;
            std::size_t drawn_complete = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = rng.next_below(n);
                const double v = value_at(j);
                acc_union += v;
                if (j < nc) {
                    acc_complete += v;
                    ++drawn_complete;
                }
            }
            if (drawn_complete > 0) {
                reps[rep] = acc_union / static_cast<double>(n) -
                            acc_complete / static_cast<double>(drawn_complete);
                break;
            }
            if (++redraws > redraw_cap)
                throw Error("bootstrap_union_delta_practice: redraw cap exceeded");
        }
    }
    return detail::summarize(union_mean - complete_mean, std::move(reps), level, seed);
}

}  // namespace tps

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tps/engine.hpp"
#include "tps/errors.hpp"
#include "tps/rng.hpp"
#include "tps/score_family.hpp"
#include "tps/trajectory.hpp"
#include "tps/weights.hpp"

namespace tps {

// Synthetic world where the truthful per-step success probability is an
// exact Bayes posterior over noisy binary signals, hence a martingale of the
// terminal outcome by construction.
struct SignalWorld {
    std::size_t horizon_T = 8;
    double prior_q1 = 0.5;
    double signal_accuracy_theta = 0.7;  // must lie in (0.5, 1)
    std::uint64_t seed = 42;
};

namespace detail {

inline void check_world(const SignalWorld& w) {
    if (w.horizon_T == 0) throw InvalidInput("SignalWorld: horizon must be >= 1");
    if (!(w.prior_q1 > 0.0 && w.prior_q1 < 1.0))
        throw InvalidInput("SignalWorld: prior must lie in (0, 1)");
    if (!(w.signal_accuracy_theta > 0.5 && w.signal_accuracy_theta < 1.0))
        throw InvalidInput("SignalWorld: signal accuracy must lie in (0.5, 1)");
}

inline std::string synth_id(std::size_t i) {
    std::ostringstream os;
    os << "synth-";
    std::string digits = std::to_string(i);
    os << std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') << digits;
    return os.str();
}

// Sharpening map pushing probabilities toward {0, 1}; monotone, fixed
// points at 0, 1/2, 1.
inline double saturate(double q) {
    const double a = q * q * q * q;
    const double b = (1.0 - q) * (1.0 - q) * (1.0 - q) * (1.0 - q);
    return a / (a + b);
}

}  // namespace detail

// Complete trajectories with the truthful stream "q_true" and four distorted
// siblings for evaluator-contrast tests: "q_shift_up"/"q_shift_down" (+-0.1,
// clipped), "q_binned" (population bin average, 10 equal-width bins), and
// "q_saturated" (sharpened toward the extremes). Deterministic per seed:
// trajectory i uses substream(seed, i).
inline std::vector<TrajectoryRecord> generate_population(const SignalWorld& world, std::size_t n) {
    detail::check_world(world);
    const double theta = world.signal_accuracy_theta;
    std::vector<TrajectoryRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng = substream(world.seed, i);
        const int y = rng.next_bernoulli(world.prior_q1) ? 1 : 0;
        std::vector<double> q(world.horizon_T);
        double odds = world.prior_q1 / (1.0 - world.prior_q1);
        for (std::size_t t = 0; t < world.horizon_T; ++t) {
            const bool signal = rng.next_bernoulli(y == 1 ? theta : 1.0 - theta);
            odds *= signal ? theta / (1.0 - theta) : (1.0 - theta) / theta;
            q[t] = odds / (1.0 + odds);
        }
        TrajectoryRecord rec;
        rec.id = detail::synth_id(i);
        rec.horizon_T = world.horizon_T;
        rec.stop_Z = world.horizon_T;
        rec.delta = true;
        rec.outcome_Y = y;
        rec.stop_reason = StopReason::clean;
        rec.streams["q_true"] = std::move(q);
        records.push_back(std::move(rec));
    }
    // Population pass for the bin-average distortion.
    std::vector<double> bin_sum(10, 0.0);
    std::vector<std::size_t> bin_count(10, 0);
    auto bin_of = [](double v) {
        auto b = static_cast<std::size_t>(v * 10.0);
        return b > 9 ? std::size_t{9} : b;
    };
    for (const auto& rec : records)
        for (double v : rec.streams.at("q_true")) {
            bin_sum[bin_of(v)] += v;
            bin_count[bin_of(v)] += 1;
        }
    const ClipPolicy clip{};
    for (auto& rec : records) {
        const auto& q = rec.streams.at("q_true");
        std::vector<double> up(q.size()), down(q.size()), binned(q.size()), sat(q.size());
        for (std::size_t t = 0; t < q.size(); ++t) {
            up[t] = clip_probability(q[t] + 0.1, clip);
            down[t] = clip_probability(q[t] - 0.1, clip);
            const auto b = bin_of(q[t]);
            binned[t] = bin_sum[b] / static_cast<double>(bin_count[b]);
            sat[t] = clip_probability(detail::saturate(q[t]), clip);
        }
        rec.streams["q_shift_up"] = std::move(up);
        rec.streams["q_shift_down"] = std::move(down);
        rec.streams["q_binned"] = std::move(binned);
        rec.streams["q_saturated"] = std::move(sat);
    }
    return records;
}

struct CensoredPopulation {
    std::vector<TrajectoryRecord> records;
    std::map<std::string, int> hidden_outcomes;  // id -> outcome removed by the cut
};

// Hides outcomes at a length-stratified rate: within each horizon_T stratum
// exactly round-half-up(rate * size) records become delta=0 with stop_Z
// uniform on 1..T-1 and streams truncated (weights stay T-normalized at
// scoring time, never renormalized). Original outcomes kept privately for
// oracle comparison.
inline CensoredPopulation artificial_censor(std::vector<TrajectoryRecord> records, double rate,
                                            std::uint64_t seed) {
    if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInput("artificial_censor: rate must be in [0, 1)");
    CensoredPopulation out;
    std::map<std::size_t, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].delta) throw WrongMode("artificial_censor: input must be complete");
        strata[records[i].horizon_T].push_back(i);
    }
    SplitMix64 rng = substream(seed, 0x6365'6e73ull);
    for (auto& [horizon, idx] : strata) {
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });
        const auto want = static_cast<std::size_t>(
            std::floor(rate * static_cast<double>(idx.size()) + 0.5));
        if (want > 0 && horizon < 2)
            throw InvalidInput("artificial_censor: cannot cut a horizon-1 stratum");
        // Partial Fisher-Yates: first `want` entries are the censored set.
        for (std::size_t k = 0; k < want; ++k)
            std::swap(idx[k], idx[k + rng.next_below(idx.size() - k)]);
        for (std::size_t k = 0; k < want; ++k) {
            TrajectoryRecord& rec = records[idx[k]];
            out.hidden_outcomes[rec.id] = *rec.outcome_Y;
            rec.delta = false;
            rec.outcome_Y.reset();
            rec.stop_reason = StopReason::max_steps;
            rec.stop_Z = 1 + rng.next_below(horizon - 1);
            for (auto& [name, stream] : rec.streams) stream.resize(rec.stop_Z);
        }
    }
    out.records = std::move(records);
    return out;
}

// Monte Carlo continuation audit for one stopped prefix: resolved branch
// outcomes under a frozen forecast stream.
struct ContinuationAudit {
    std::string prefix_id;
    std::vector<int> branch_outcomes;  // valid (resolved) branches only, 0/1
    std::size_t valid_count() const { return branch_outcomes.size(); }
};

// Branch-outcome mean; prefixes with fewer valid branches than the retention
// minimum are excluded rather than estimated.
inline double mc_qz(const ContinuationAudit& audit, std::size_t min_valid = 5) {
    if (audit.valid_count() < min_valid)
        throw ExcludedPrefix("mc_qz: prefix '" + audit.prefix_id + "' has " +
                             std::to_string(audit.valid_count()) + " valid branches, need " +
                             std::to_string(min_valid));
    double acc = 0.0;
    for (int y : audit.branch_outcomes) acc += y;
    return acc / static_cast<double>(audit.valid_count());
}

// |exact score with the MC branch weight - branch-average complete-prefix
// score|. Zero up to rounding because the exact censored score is the
// conditional projection of the complete score.
inline double conditional_projection_check(std::span<const double> stream,
                                           std::span<const double> w, const ScoreFamily& fam,
                                           const ContinuationAudit& audit,
                                           std::size_t min_valid = 1) {
    const double qz = mc_qz(audit, min_valid);
    const double exact = tps_cen_exact(stream, /*delta=*/false, std::nullopt, qz, w, fam).total;
    CompensatedSum acc;
    for (int y : audit.branch_outcomes) acc.add(tps_complete(stream, y, w, fam).total);
    const double branch_avg = acc.value() / static_cast<double>(audit.valid_count());
    return std::fabs(exact - branch_avg);
}

namespace detail {

// Exact fraction arithmetic for the counterexample constants.
struct Rational {
    long long num = 0, den = 1;
    static long long gcd_ll(long long a, long long b) {
        a = a < 0 ? -a : a;
        b = b < 0 ? -b : b;
        while (b) {
            const long long t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }
    static Rational make(long long n, long long d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const long long g = gcd_ll(n, d);
        return {n / g, d / g};
    }
    Rational operator+(Rational o) const { return make(num * o.den + o.num * den, den * o.den); }
    Rational operator-(Rational o) const { return make(num * o.den - o.num * den, den * o.den); }
    Rational operator*(Rational o) const { return make(num * o.num, den * o.den); }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Rational rat(long long n, long long d) { return Rational::make(n, d); }

}  // namespace detail

// Reliability-only blindness of T-ECE: a two-context population where the
// truthful forecast and the base-rate constant both achieve T-ECE 0 while
// the truthful forecast carries Brier resolution 0.09.
struct CalibrationBlindnessReport {
    double tece_truthful = 0.0;
    double tece_constant = 0.0;
    double brier_resolution = 0.0;
};

inline CalibrationBlindnessReport counterexample_calibration_blindness() {
    using detail::rat;
    // Contexts a, b each with 10 trajectories; conditional success 0.2 / 0.8
    // realized by exact counts (2 and 8 successes).
    // Both bin structures are pure (truthful splits by context, the constant
    // has one bin), so each binwise gap is exactly conditional-mean minus
    // conditional-rate.
    const auto gap_a = rat(1, 5) - rat(2, 10);   // truthful bin a
    const auto gap_b = rat(4, 5) - rat(8, 10);   // truthful bin b
    const auto gap_c = rat(1, 2) - rat(10, 20);  // constant single bin
    // Brier resolution: constant-forecast loss minus truthful loss.
    // Per context: mean (p - Y)^2 over the exact counts.
    auto brier = [](detail::Rational p, long long succ, long long n) {
        const auto one = rat(1, 1);
        const auto s = rat(succ, n);
        return s * (one - p) * (one - p) + (one - s) * p * p;
    };
    const auto half = rat(1, 2);
    const auto loss_truthful = half * brier(rat(1, 5), 2, 10) + half * brier(rat(4, 5), 8, 10);
    const auto loss_constant = half * brier(half, 2, 10) + half * brier(half, 8, 10);
    CalibrationBlindnessReport rep;
    rep.tece_truthful = (half * gap_a + half * gap_b).to_double();
    rep.tece_constant = gap_c.to_double();
    rep.brier_resolution = (loss_constant - loss_truthful).to_double();
    return rep;
}

// Also materializes the blindness population as records so the double-
// precision diagnostics pipeline can be run against the exact constants.
inline std::vector<TrajectoryRecord> calibration_blindness_population() {
    std::vector<TrajectoryRecord> records;
    auto add = [&](const std::string& tag, std::size_t i, double q, int y) {
        TrajectoryRecord rec;
        rec.id = "blind-" + tag + "-" + std::to_string(i);
        rec.horizon_T = 1;
        rec.stop_Z = 1;
        rec.delta = true;
        rec.outcome_Y = y;
        rec.stop_reason = StopReason::clean;
        rec.streams["q_true"] = {q};
        rec.streams["base_rate"] = {0.5};
        records.push_back(std::move(rec));
    };
    for (std::size_t i = 0; i < 10; ++i) add("a", i, 0.2, i < 2 ? 1 : 0);
    for (std::size_t i = 0; i < 10; ++i) add("b", i, 0.8, i < 8 ? 1 : 0);
    return records;
}

// Aggregator-level impropriety on a two-step process (q1 = 1/2, q2 in
// {7/10, 3/10} equally likely): average, minimum, weighted, and last-step
// collapses each fail strict propriety in a specific way. All constants
// evaluated in exact rational arithmetic.
struct AggregatorImproprietyReport {
    double avg_excess = 0.0;       // truthful-minus-gamed conditional Brier loss
    double min_gap_event = 0.0;    // non-truthful-minus-truthful on the q2 = 0.7 event
    double weighted_diff = 0.0;    // perturbed-trace aggregate difference
    bool last_tie = false;         // non-truthful trace ties the truthful loss
};

inline AggregatorImproprietyReport counterexample_aggregator_impropriety() {
    using detail::Rational;
    using detail::rat;
    const auto one = rat(1, 1);
    const auto half = rat(1, 2);
    const Rational q1 = half;
    const Rational q2_hi = rat(7, 10), q2_lo = rat(3, 10);
    // Conditional expected squared loss of scalar x against Y ~ Bern(q):
    // (x - q)^2 + q (1 - q).
    auto loss = [&](Rational x, Rational q) { return (x - q) * (x - q) + q * (one - q); };

    AggregatorImproprietyReport rep;
    // Average aggregator: gamed trace (q1, 2 q2 - q1) averages to q2 exactly,
    // beating the truthful average (q1 + q2)/2 by ((q1 - q2)/2)^2 = 0.01 on
    // each branch.
    {
        auto excess_on = [&](Rational q2) {
            const Rational phi_truth = half * (q1 + q2);
            const Rational phi_gamed = half * (q1 + (rat(2, 1) * q2 - q1));
            return loss(phi_truth, q2) - loss(phi_gamed, q2);
        };
        rep.avg_excess = (half * excess_on(q2_hi) + half * excess_on(q2_lo)).to_double();
    }
    // Minimum aggregator on the q2 = 0.7 branch: truthful min is q1 = 0.5,
    // the non-truthful trace (0.7, 0.7) attains min q2 and scores better.
    {
        const Rational truthful_min = q1;  // min(1/2, 7/10)
        const Rational gamed_min = q2_hi;
        rep.min_gap_event = (loss(gamed_min, q2_hi) - loss(truthful_min, q2_hi)).to_double();
    }
    // Weighted aggregator w = (1/2, 1/2): the perturbation (q1 + c, q2 - c)
    // leaves the aggregate untouched for any branch, c = 1/20.
    {
        const Rational c = rat(1, 20);
        auto agg = [&](Rational g1, Rational g2) { return half * g1 + half * g2; };
        Rational worst = rat(0, 1);
        for (Rational q2 : {q2_hi, q2_lo}) {
            const Rational diff = agg(q1 + c, q2 - c) - agg(q1, q2);
            if ((diff * diff).to_double() > (worst * worst).to_double()) worst = diff;
        }
        rep.weighted_diff = worst.to_double();
    }
    // Last-step aggregator: any trace agreeing at the last step ties exactly,
    // so truthfulness at earlier steps is never strictly rewarded.
    {
        const Rational g1_wrong = rat(9, 10);
        bool tie = true;
        for (Rational q2 : {q2_hi, q2_lo}) {
            const Rational diff = loss(q2, q2) - loss(q2, q2);  // last step is q2 either way
            tie = tie && diff.num == 0;
            (void)g1_wrong;
        }
        rep.last_tie = tie;
    }
    return rep;
}

// Population with a known wedge between the pseudo-label target
// m = P(delta = 1, Y = 1 | history) and the success process q. Censoring is
// independent of the outcome (m = (1 - censor_prob) * q exactly) and uses
// exact proportions so constant-forecast argmaxes land on m and q without
// sampling error. Censored records keep the full-length stream (stop at the
// horizon) and carry qz_estimate = q.
struct PseudoLabelPopulation {
    std::vector<TrajectoryRecord> records;
    double q_bar = 0.0;  // success probability, the exact-score target
    double m_bar = 0.0;  // pseudo-label rate, the simple-score target
};

inline PseudoLabelPopulation pseudo_label_population(double q, double censor_prob, std::size_t n,
                                                     std::size_t horizon_T) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidInput("pseudo_label_population: q must be in (0, 1)");
    if (!(censor_prob >= 0.0 && censor_prob < 1.0))
        throw InvalidInput("pseudo_label_population: censor_prob must be in [0, 1)");
    if (horizon_T == 0 || n == 0) throw InvalidInput("pseudo_label_population: need n, T >= 1");
    const auto n_censored = static_cast<std::size_t>(
        std::floor(censor_prob * static_cast<double>(n) + 0.5));
    const std::size_t n_complete = n - n_censored;
    const auto n_success = static_cast<std::size_t>(
        std::floor(q * static_cast<double>(n_complete) + 0.5));
    PseudoLabelPopulation out;
    out.q_bar = q;
    out.m_bar = (static_cast<double>(n_complete) / static_cast<double>(n)) *
                (static_cast<double>(n_success) / static_cast<double>(n_complete));
    const std::vector<double> stream(horizon_T, q);
    for (std::size_t i = 0; i < n; ++i) {
        TrajectoryRecord rec;
        rec.id = "pseudo-" + std::to_string(i);
        rec.horizon_T = horizon_T;
        rec.stop_Z = horizon_T;
        rec.streams["q_true"] = stream;
        if (i < n_censored) {
            rec.delta = false;
            rec.stop_reason = StopReason::max_steps;
            rec.qz_estimate = q;
        } else {
            rec.delta = true;
            rec.outcome_Y = (i - n_censored) < n_success ? 1 : 0;
            rec.stop_reason = StopReason::clean;
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace tps

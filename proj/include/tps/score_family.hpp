#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "tps/errors.hpp"

namespace tps {

// Probability clipping into [eps, 1-eps]. One clip site for the whole
// pipeline: streams are clipped at ingestion, log scoring assumes it.
struct ClipPolicy {
    double epsilon = 1e-6;
};

inline double clip_probability(double p, ClipPolicy policy = {}) {
    if (!std::isfinite(p)) throw InvalidInput("clip_probability: non-finite probability");
    const double eps = policy.epsilon;
    if (!(eps > 0.0 && eps < 0.5)) throw InvalidInput("clip_probability: epsilon outside (0, 0.5)");
    return std::min(std::max(p, eps), 1.0 - eps);
}

// Binary score selector: the log endpoint or a beta-family member S_{a,b}.
struct ScoreFamily {
    enum class Kind { log, beta };
    Kind kind = Kind::log;
    double alpha = 0.0;  // beta only
    double beta = 0.0;   // beta only

    static ScoreFamily log_score() { return {Kind::log, 0.0, 0.0}; }
    static ScoreFamily brier() { return beta_family(1.0, 1.0); }
    static ScoreFamily beta_family(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("ScoreFamily: alpha, beta must be > 0");
        return {Kind::beta, a, b};
    }
};

inline double log_beta_function(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double beta_function(double a, double b) { return std::exp(log_beta_function(a, b)); }

namespace detail {

// Continued fraction for I_x(a,b), modified Lentz iteration.
inline double incbeta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double tol = 1e-16;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < tol) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a,b), absolute error well below 1e-12 over
// the parameter ranges used here. Symmetry switch at x > (a+1)/(a+b+2).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("regularized_incomplete_beta: a, b must be > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("regularized_incomplete_beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta_function(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::incbeta_cf(a, b, x) / a;
    }
    return 1.0 - front * detail::incbeta_cf(b, a, 1.0 - x) / b;
}

namespace detail {

inline bool is_small_integer(double v, long& out) {
    const double r = std::round(v);
    if (std::fabs(v - r) > 1e-12 || r < 1.0 || r > 30.0) return false;
    out = static_cast<long>(r);
    return true;
}

inline double binomial(long n, long k) {
    double r = 1.0;
    for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// Exact polynomial expansion of the score integrals for integer parameters.
// S(p,1) = -int_p^1 c^{a-1}(1-c)^b dc, S(p,0) = -int_0^p c^a (1-c)^{b-1} dc.
inline double score_integer(long a, long b, double p, int y) {
    double acc = 0.0;
    if (y == 1) {
        for (long k = 0; k <= b; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            acc += sign * binomial(b, k) * (1.0 - std::pow(p, static_cast<double>(a + k))) /
                   static_cast<double>(a + k);
        }
    } else {
        for (long k = 0; k < b; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            acc += sign * binomial(b - 1, k) * std::pow(p, static_cast<double>(a + 1 + k)) /
                   static_cast<double>(a + 1 + k);
        }
    }
    return -acc;
}

inline double score_incbeta(double a, double b, double p, int y) {
    if (y == 1) return -beta_function(a, b + 1.0) * (1.0 - regularized_incomplete_beta(a, b + 1.0, p));
    return -beta_function(a + 1.0, b) * regularized_incomplete_beta(a + 1.0, b, p);
}

}  // namespace detail

// Reward-oriented binary score. Beta family accepts p in [0,1] directly
// (wrong-boundary floors are finite); the log endpoint requires the caller
// to have clipped p into (0,1).
inline double binary_score(const ScoreFamily& fam, double p, int y) {
    if (y != 0 && y != 1) throw InvalidInput("binary_score: outcome must be 0 or 1");
    if (!std::isfinite(p)) throw InvalidInput("binary_score: non-finite probability");
    if (fam.kind == ScoreFamily::Kind::log) {
        if (!(p > 0.0 && p < 1.0))
            throw InvalidInput("binary_score: log family requires clipped p in (0, 1)");
        return y == 1 ? std::log(p) : std::log1p(-p);
    }
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("binary_score: p outside [0, 1]");
    long ia, ib;
    if (detail::is_small_integer(fam.alpha, ia) && detail::is_small_integer(fam.beta, ib))
        return detail::score_integer(ia, ib, p, y);
    return detail::score_incbeta(fam.alpha, fam.beta, p, y);
}

// D(p) = S(p,1) - S(p,0); strictly increasing for strictly proper members.
inline double score_contrast(const ScoreFamily& fam, double p) {
    return binary_score(fam, p, 1) - binary_score(fam, p, 0);
}

// Finite worst-case scores of a beta-family member: (S(0,1), S(1,0)).
inline std::pair<double, double> wrong_boundary_floors(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw InvalidInput("wrong_boundary_floors: alpha, beta must be > 0");
    return {-beta_function(alpha, beta + 1.0), -beta_function(alpha + 1.0, beta)};
}

}  // namespace tps

// Independent reference implementations used only by the tests. Everything
// here is deliberately slow and structurally different from the library
// code paths it checks.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

// Double-exponential (tanh-sinh) quadrature over (lo, hi). Step 1/128 with
// |u| <= 6 is far below 1e-13 error for the beta-type integrands used here,
// including the endpoint singularities at exponents down to 0.1. The core
// passes the abscissa together with its exact distances to both endpoints so
// singular factors can be evaluated without catastrophic cancellation.
inline double tanh_sinh_de(const std::function<double(double, double, double)>& f, double lo,
                           double hi) {
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    const double h = 1.0 / 128.0;
    const int kmax = 6 * 128;
    double sum = 0.0;
    const double half_pi = 1.5707963267948966;
    for (int k = -kmax; k <= kmax; ++k) {
        const double u = k * h;
        const double sh = half_pi * std::sinh(u);
        const double ch = std::cosh(sh);
        const double w = half_pi * std::cosh(u) / (ch * ch);
        // 1 -+ tanh(sh) computed without cancellation.
        const double dist_hi = r * 2.0 / (1.0 + std::exp(2.0 * sh));
        const double dist_lo = r * 2.0 / (1.0 + std::exp(-2.0 * sh));
        const double x = k < 0 ? lo + dist_lo : hi - dist_hi;
        if (dist_lo == 0.0 || dist_hi == 0.0 || w == 0.0) continue;
        const double val = f(x, dist_lo, dist_hi) * w;
        if (std::isfinite(val)) sum += val;
    }
    return sum * r * h;
}

inline double tanh_sinh(const std::function<double(double)>& f, double lo, double hi) {
    return tanh_sinh_de([&](double x, double, double) { return f(x); }, lo, hi);
}

// Regularized incomplete beta by quadrature of both numerator and
// denominator; shares nothing with the library's continued fraction.
inline double incbeta_quadrature(double a, double b, double x) {
    // Integrand of B(a, b) over (lo, hi); endpoint distances substitute for t
    // and 1 - t wherever the interval actually touches 0 or 1.
    auto piece = [a, b](double lo, double hi) {
        return tanh_sinh_de(
            [=](double t, double dlo, double dhi) {
                const double tt = lo == 0.0 ? dlo : t;
                const double omt = hi == 1.0 ? dhi : 1.0 - t;
                return std::pow(tt, a - 1.0) * std::pow(omt, b - 1.0);
            },
            lo, hi);
    };
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double full = piece(0.0, 1.0);
    // Integrate the smaller tail for accuracy, using the complement otherwise.
    if (x <= 0.5) return piece(0.0, x) / full;
    return 1.0 - piece(x, 1.0) / full;
}

struct LabeledScalar {
    double confidence;
    int label;  // 1 = success, 0 = failure
};

// Pairwise-counting AUROC with failures as the positive (high-risk) class.
inline double auroc_pairs(std::span<const LabeledScalar> v) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (const auto& f : v) {
        if (f.label != 0) continue;
        for (const auto& s : v) {
            if (s.label != 1) continue;
            ++pairs;
            // Higher risk = lower confidence.
            if (f.confidence < s.confidence)
                wins += 1.0;
            else if (f.confidence == s.confidence)
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

// Average precision over the risk-descending ranking; assumes all
// confidences distinct (ties make AP order-dependent).
inline double average_precision(std::vector<LabeledScalar> v) {
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.confidence < b.confidence; });
    double acc = 0.0;
    std::size_t tp = 0, n_pos = 0;
    for (const auto& s : v) n_pos += (s.label == 0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k].label != 0) continue;
        ++tp;
        acc += static_cast<double>(tp) / static_cast<double>(k + 1);
    }
    return acc / static_cast<double>(n_pos);
}

// Mean selective error over coverage levels, confidence descending.
inline double aurc_direct(std::vector<LabeledScalar> v) {
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.confidence > b.confidence; });
    double acc = 0.0;
    std::size_t errors = 0;
    for (std::size_t k = 1; k <= v.size(); ++k) {
        errors += (v[k - 1].label == 0);
        acc += static_cast<double>(errors) / static_cast<double>(k);
    }
    return acc / static_cast<double>(v.size());
}

}  // namespace oracle

#pragma once

#include <cmath>
#include <span>

#include "damsim/common.hpp"

namespace damsim {

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    auto betacf = [](double a_, double b_, double x_) {
        constexpr int kMaxIter = 300;
        constexpr double kEps = 3e-14, kFpMin = 1e-300;
        const double qab = a_ + b_, qap = a_ + 1.0, qam = a_ - 1.0;
        double c = 1.0, d = 1.0 - qab * x_ / qap;
        if (std::abs(d) < kFpMin) d = kFpMin;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= kMaxIter; ++m) {
            const int m2 = 2 * m;
            double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < kFpMin) d = kFpMin;
            c = 1.0 + aa / c;
            if (std::abs(c) < kFpMin) c = kFpMin;
            d = 1.0 / d;
            h *= d * c;
            aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < kFpMin) d = kFpMin;
            c = 1.0 + aa / c;
            if (std::abs(c) < kFpMin) c = kFpMin;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < kEps) break;
        }
        return h;
    };

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(b) - std::lgamma(a) +
                          b * std::log1p(-x) + a * std::log(x)) *
                     betacf(b, a, 1.0 - x) / b;
}

struct WelchResult {
    bool testable = false;
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Welch's unequal-variance two-sample t statistic with corrected sample
/// standard deviations, Welch-Satterthwaite degrees of freedom, and a
/// two-sided p-value from the t CDF. Degenerate zero-variance samples:
/// equal means give t = 0, p = 1; different means give t = +-inf, p = 0.
inline WelchResult welch_t(std::span<const double> sample_a, std::span<const double> sample_b) {
    WelchResult r;
    const size_t na = sample_a.size(), nb = sample_b.size();
    if (na < 2 || nb < 2) return r;

    auto mean_var = [](std::span<const double> s) {
        double mean = 0.0;
        for (double v : s) mean += v;
        mean /= static_cast<double>(s.size());
        double var = 0.0;
        for (double v : s) var += (v - mean) * (v - mean);
        var /= static_cast<double>(s.size() - 1);
        return std::pair<double, double>(mean, var);
    };
    const auto [ma, va] = mean_var(sample_a);
    const auto [mb, vb] = mean_var(sample_b);
    if (!is_finite(ma) || !is_finite(mb) || !is_finite(va) || !is_finite(vb)) return r;
    r.testable = true;

    const double sa = va / static_cast<double>(na);
    const double sb = vb / static_cast<double>(nb);
    if (sa + sb <= 0.0) {
        if (ma == mb) {
            r.t = 0.0;
            r.df = static_cast<double>(na + nb - 2);
            r.p = 1.0;
        } else {
            r.t = ma > mb ? kInf : -kInf;
            r.df = static_cast<double>(na + nb - 2);
            r.p = 0.0;
        }
        return r;
    }
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.df = (sa + sb) * (sa + sb) /
           (sa * sa / static_cast<double>(na - 1) + sb * sb / static_cast<double>(nb - 1));
    r.p = regularized_incomplete_beta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t));
    return r;
}

} // namespace damsim

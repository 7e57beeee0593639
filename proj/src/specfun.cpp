// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/specfun.hpp"
#include "lorafas/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lorafas::specfun {

double lambert_w0(double x) {
    if (std::isnan(x)) throw std::domain_error("lambert_w0: NaN argument");
    constexpr double kInvE = 0.36787944117144232160;
    if (x < -kInvE) {
        if (x > -kInvE - 1e-15) return -1.0;
        throw std::domain_error("lambert_w0: argument below -1/e");
    }
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;

    double w;
    if (x < -0.25) {
        // branch-point series in p = sqrt(2(ex + 1))
        const double p = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = std::log1p(x);
        if (x > 0.5) w *= 0.75;
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    for (int it = 0; it < 64; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 1e-15 * (1.0 + std::abs(w))) break;
    }
    return std::max(w, -1.0);
}

double erfc(double x) { return std::erfc(x); }

double gauss_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double inv_norm_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inv_norm_cdf: p must lie in (0, 1)");
    // Acklam's rational approximation
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against erfc
    for (int it = 0; it < 2; ++it) {
        const double e = (x < 0.0) ? norm_cdf(x) - p : (1.0 - p) - gauss_q(x);
        const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double bessel_i0e(double x) {
    const double ax = std::abs(x);
    if (ax <= 50.0) {
        const double q = 0.25 * ax * ax;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 500; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return sum * std::exp(-ax);
    }
    // asymptotic expansion, terms shrink until k ~ 2x
    const double z = 8.0 * ax;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * z);
        if (next > term) break;
        term = next;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / std::sqrt(2.0 * kPi * ax);
}

double bessel_i0(double x) {
    const double ax = std::abs(x);
    if (ax <= 50.0) return bessel_i0e(ax) * std::exp(ax);
    // split the exponential to delay overflow
    const double h = std::exp(0.5 * ax);
    return bessel_i0e(ax) * h * h;
}

double sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double log_binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
    const int m = std::min(k, n - k);
    if (m <= 2000) {
        double s = 0.0;
        for (int i = 1; i <= m; ++i) s += std::log(static_cast<double>(n - m + i) / i);
        return s;
    }
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

namespace {

double marcum_q1_series(double a, double b) {
    // Poisson mixture: sum_k Pois(k; a^2/2) * P(Pois(b^2/2) <= k)
    const double la = 0.5 * a * a;
    const double lb = 0.5 * b * b;
    double w = std::exp(-la);
    double t = std::exp(-lb);
    double cdf = t;
    double sum = w * cdf;
    for (int k = 1; k < 100000; ++k) {
        w *= la / k;
        t *= lb / k;
        cdf += t;
        sum += w * std::min(cdf, 1.0);
        if (k > la) {
            const double ratio = la / (k + 1.0);
            if (w * ratio / (1.0 - ratio) < 1e-18) break;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

double marcum_q1_integral(double a, double b) {
    // Q1(a,b) = int_b^inf x exp(-(x-a)^2/2) I0e(a x) dx
    auto f = [a](double x) { return x * std::exp(-0.5 * (x - a) * (x - a)) * bessel_i0e(a * x); };
    const double hi = std::max(a, b) + 40.0;
    quad::QuadOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    if (b < a) {
        // complement keeps the integration range short
        const double lower = quad::integrate(f, 0.0, b, opt).value;
        return std::clamp(1.0 - lower, 0.0, 1.0);
    }
    return std::clamp(quad::integrate(f, b, hi, opt).value, 0.0, 1.0);
}

} // namespace

double marcum_q1(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw std::domain_error("marcum_q1: non-finite argument");
    if (a < 0.0 || b < 0.0) throw std::domain_error("marcum_q1: arguments must be non-negative");
    if (b == 0.0) return 1.0;
    if (a == 0.0) return std::exp(-0.5 * b * b);
    if (b > a + 40.0) return 0.0;
    if (a * b <= 30.0 && 0.5 * a * a < 600.0 && 0.5 * b * b < 600.0) return marcum_q1_series(a, b);
    return marcum_q1_integral(a, b);
}

} // namespace lorafas::specfun

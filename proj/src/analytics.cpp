// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/analytics.hpp"
#include "lorafas/quadrature.hpp"
#include "lorafas/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lorafas::analytics {
namespace {

constexpr double kPi = specfun::kPi;
constexpr double kSqrtPi = 1.77245385090551602730;

// Neumaier-compensated running sum that also tracks sum |x|.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    double abs_sum = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
        abs_sum += std::abs(x);
    }
    double value() const { return sum + comp; }
};

// signed binomial weight (-1)^(k-1) C(n-1, k-1), from the log domain
double alt_binomial(int n, int k) {
    const double mag = std::exp(specfun::log_binomial(n - 1, k - 1));
    return (k % 2 == 1) ? mag : -mag;
}

// int_t^inf exp(-a r^2 + 2 b r - c) dr, a > 0
double gauss_tail(double a, double b, double c, double t) {
    const double sa = std::sqrt(a);
    return std::exp(b * b / a - c) * kSqrtPi / (2.0 * sa) * std::erfc(sa * (t - b / a));
}

// int_t^inf (r - d) exp(-(x1 r^2 + x2 r + x3)) dr, x1 > 0
double shifted_moment(double x1, double x2, double x3, double d, double t) {
    const double s = x2 / (2.0 * x1);
    const double t0 = t + s;
    const double e = x1 * s * s - x3;
    const double term1 = std::exp(e - x1 * t0 * t0) / (2.0 * x1);
    const double term2 = (s + d) * kSqrtPi / (2.0 * std::sqrt(x1)) * std::exp(e) * std::erfc(std::sqrt(x1) * t0);
    return term1 - term2;
}

double theta_sign(ThetaConvention c) { return c == ThetaConvention::kDecaying ? 1.0 : -1.0; }

// Common part of the two averaged leakage integrals: the integrand
// (r - db) exp(-lam (r - db)^2 - q r^2) erfc((u - g r)/v) with erfc replaced
// by 2 exp(-sgn (T1 x^2 + T2 x + T3)), x = (u - g r)/v.
double leakage_moment(double lam, double db, double q, double u, double g, double v, double t,
                      const AnalyticConstants &k) {
    const double sgn = theta_sign(k.convention);
    const double t1 = sgn * k.theta[0];
    const double t2 = sgn * k.theta[1];
    const double t3 = sgn * k.theta[2];
    const double x1 = lam + q + t1 * g * g / (v * v);
    const double x2 = -2.0 * lam * db - 2.0 * t1 * u * g / (v * v) - t2 * g / v;
    const double x3 = lam * db * db + t1 * u * u / (v * v) + t2 * u / v + t3;
    if (!(x1 > 0.0)) return std::numeric_limits<double>::infinity();
    return 2.0 * shifted_moment(x1, x2, x3, db, t);
}

} // namespace

SerContext make_context(const phy::LoRaParams &lora, const channel::BlockModel &model, ThetaConvention convention) {
    lora.validate();
    model.validate();
    SerContext c;
    c.lora = lora;
    c.model = model;
    c.m_order = lora.m();
    if (c.m_order < 8) throw std::invalid_argument("make_context: M must be at least 8");
    c.n0 = 1.0 / (lora.snr_linear() * c.m_order);
    c.data_fraction = lora.data_fraction();
    c.full_symbol = lora.full_symbol();
    const cplx x1 = phy::xi(lora, 1);
    c.xi_abs = std::abs(x1);
    c.xi_re = x1.real();
    const int excluded = c.full_symbol ? 1 : 3;
    c.sigma_ncoh = sigma_ncoh(c.m_order, c.n0, excluded);
    c.sigma_coh = sigma_coh(c.m_order, c.n0, excluded);
    for (int s : model.block_sizes) c.deltas.push_back(delta_b(model.mu_sq, s));
    c.delta_hat = *std::max_element(c.deltas.begin(), c.deltas.end());
    c.constants.convention = convention;
    c.constants.alpha = {0.25, c.xi_abs > 0.0 ? 0.25 / c.xi_abs : 0.0};
    return c;
}

double delta_b(double mu_sq, int l_b) {
    if (!(mu_sq > 0.0 && mu_sq < 1.0)) throw std::invalid_argument("delta_b: mu^2 must lie in (0, 1)");
    if (l_b < 1) throw std::invalid_argument("delta_b: block size must be positive");
    if (l_b <= 2) return 0.0;
    const double arg = (l_b - 2.0) * (l_b - 2.0) / (2.0 * kPi);
    return std::sqrt(0.5 * (1.0 - mu_sq) * specfun::lambert_w0(arg));
}

double cdf_block(double r, double mu_sq, int l_b) {
    const double d = delta_b(mu_sq, l_b);
    if (r <= d) return 0.0;
    return -std::expm1(-(r - d) * (r - d) / mu_sq);
}

double cdf_fas(double r, const channel::BlockModel &model) {
    model.validate();
    const int b = model.num_blocks;
    double dhat = 0.0;
    std::vector<double> ds;
    for (int s : model.block_sizes) {
        ds.push_back(delta_b(model.mu_sq, s));
        dhat = std::max(dhat, ds.back());
    }
    if (r < dhat) return 0.0;
    double acc = 0.0;
    for (double d : ds) acc += std::pow(-std::expm1(-(r - d) * (r - d) / model.mu_sq), b);
    return acc / b;
}

double pdf_fas(double r, const channel::BlockModel &model) {
    model.validate();
    const int b = model.num_blocks;
    double dhat = 0.0;
    std::vector<double> ds;
    for (int s : model.block_sizes) {
        ds.push_back(delta_b(model.mu_sq, s));
        dhat = std::max(dhat, ds.back());
    }
    if (r < dhat) return 0.0;
    Accumulator acc;
    for (double d : ds) {
        const double u = (r - d) * (r - d) / model.mu_sq;
        for (int bt = 1; bt <= b; ++bt)
            acc.add(alt_binomial(b, bt) * 2.0 / model.mu_sq * (r - d) * std::exp(-bt * u));
    }
    return std::max(0.0, acc.value());
}

double sigma_ncoh(int m_order, double n0, int excluded) {
    const int n = m_order - excluded;
    if (m_order < 8 || n < 2) throw std::invalid_argument("sigma_ncoh: need M >= 8");
    if (!(n0 > 0.0)) throw std::invalid_argument("sigma_ncoh: N0 must be positive");
    const double ln = std::log(static_cast<double>(n));
    return std::sqrt(n0 * ln) * (1.0 + specfun::kEulerGamma / (2.0 * ln));
}

double sigma_coh(int m_order, double n0, int excluded) {
    const int n = m_order - excluded;
    if (m_order < 8 || n < 2) throw std::invalid_argument("sigma_coh: need M >= 8");
    if (!(n0 > 0.0)) throw std::invalid_argument("sigma_coh: N0 must be positive");
    const double g = specfun::kEulerGamma;
    return std::sqrt(0.5 * n0) * ((1.0 - g) * specfun::inv_norm_cdf(1.0 - 1.0 / n) +
                                  g * specfun::inv_norm_cdf(1.0 - 1.0 / (std::exp(1.0) * n)));
}

double marcum_q1_approx(double xi_abs, double r, double z, double n0, bool *in_region) {
    const double xr = xi_abs * r;
    if (in_region) *in_region = z >= xr;
    if (xr <= 0.0) return std::exp(-z * z / n0);
    const double e = std::exp(-(z - xr) * (z - xr) / n0);
    return 0.25 * e + 0.25 * z / xr * e;
}

ApproxEnvelope marcum_approx_diagnostic(double xi_abs, double n0, std::span<const double> r_grid,
                                        std::span<const double> z_grid) {
    ApproxEnvelope env;
    const double s = std::sqrt(0.5 * n0);
    for (double r : r_grid) {
        for (double z : z_grid) {
            bool ok = false;
            const double approx = marcum_q1_approx(xi_abs, r, z, n0, &ok);
            if (!ok) continue;
            const double exact = specfun::marcum_q1(xi_abs * r / s, z / s);
            const double err = std::abs(approx - exact);
            env.max_abs_error = std::max(env.max_abs_error, err);
            if (exact > 1e-300) env.max_rel_error = std::max(env.max_rel_error, err / exact);
            ++env.points;
        }
    }
    return env;
}

double erfc_exp_approx(double x, ThetaConvention convention) {
    const AnalyticConstants k;
    const double sgn = theta_sign(convention);
    return 2.0 * std::exp(-sgn * (k.theta[0] * x * x + k.theta[1] * x + k.theta[2]));
}

double cond_ser_ncoh(double r, const SerContext &ctx) {
    r = std::max(r, 1e-9);
    const double n0 = ctx.n0;
    const double d = ctx.data_fraction;
    const double sg = ctx.sigma_ncoh;
    const double a1 = std::erfc((sg - d * r) / std::sqrt(n0));
    if (ctx.full_symbol) return std::clamp(1.0 - 0.5 * a1, 0.0, 1.0);
    const double x = ctx.xi_abs;
    const double a2 = std::exp(-(2.0 * sg * sg - 2.0 * sg * (d + x) * r + (d * d + x * x) * r * r) / n0);
    const double a3 =
        std::exp(-(d - x) * (d - x) * r * r / (2.0 * n0)) * std::erfc((2.0 * sg - (d + x) * r) / std::sqrt(2.0 * n0));
    const double c2 = 2.0 / std::sqrt(kPi * n0);
    const double k8 = std::sqrt(kPi * n0 / 8.0);
    const auto &al = ctx.constants.alpha;
    const double p = 1.0 - 0.5 * a1 +
                     c2 * (al[0] * k8 * a3 + al[1] / r * (0.25 * n0 * a2 + 0.5 * (d + x) * r * k8 * a3));
    return std::clamp(p, 0.0, 1.0);
}

double cond_ser_coh(double r, const SerContext &ctx) {
    r = std::max(r, 0.0);
    const double n0 = ctx.n0;
    const double d = ctx.data_fraction;
    const double sg = ctx.sigma_coh;
    double p = 1.0 - 0.5 * std::erfc((sg - d * r) / std::sqrt(n0));
    if (!ctx.full_symbol) {
        const double c = ctx.xi_re;
        const auto &k = ctx.constants;
        for (int i = 0; i < 2; ++i) {
            const double kk = 1.0 + 2.0 * k.beta_tilde[i];
            p += k.alpha_tilde[i] / std::sqrt(kk) *
                 std::exp(-2.0 * k.beta_tilde[i] * (d * r - c * r) * (d * r - c * r) / (n0 * kk)) *
                 std::erfc((sg * kk - d * r - 2.0 * k.beta_tilde[i] * c * r) / std::sqrt(n0 * kk));
        }
    }
    return std::clamp(p, 0.0, 1.0);
}

QuadValue cond_ser_exact_quad(double r, const SerContext &ctx) {
    const int m = ctx.m_order;
    if (r <= 0.0) return {(m - 1.0) / m, 0.0, true};
    const double n0 = ctx.n0;
    const double s = std::sqrt(0.5 * n0);
    const double d = ctx.data_fraction;
    // |xi_d| = |xi_{-d}|, so pair the offsets
    std::vector<double> a;
    std::vector<int> mult;
    for (int k = 1; k <= m / 2; ++k) {
        a.push_back(std::abs(phy::xi(ctx.lora, k)) * r / s);
        mult.push_back(k == m / 2 ? 1 : 2);
    }
    auto integrand = [&](double z) {
        if (z <= 0.0) return 0.0;
        double logp = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double q = specfun::marcum_q1(a[i], z / s);
            if (q >= 1.0) return (2.0 * z / n0) * std::exp(-(z - d * r) * (z - d * r) / n0) *
                                 specfun::bessel_i0e(2.0 * d * z * r / n0);
            logp += mult[i] * std::log1p(-q);
        }
        const double miss = -std::expm1(logp);
        return miss * (2.0 * z / n0) * std::exp(-(z - d * r) * (z - d * r) / n0) *
               specfun::bessel_i0e(2.0 * d * z * r / n0);
    };
    quad::QuadOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-9;
    const double sn = std::sqrt(n0);
    const double hi = d * r + 12.0 * sn;
    const double mid = std::max(0.0, d * r - 12.0 * sn);
    double value = 0.0, err = 0.0;
    bool ok = true;
    // The pdf mass below mid is negligible but the miss factor is near 1 there.
    for (auto [lo, up] : {std::pair{0.0, mid}, std::pair{mid, hi}}) {
        if (up <= lo) continue;
        const auto q = quad::integrate(integrand, lo, up, opt);
        value += q.value;
        err += q.abs_error;
        ok = ok && q.converged;
    }
    return {std::clamp(value, 0.0, 1.0), err, ok};
}

QuadValue cond_ser_coh_exact_quad(double r, const SerContext &ctx) {
    const int m = ctx.m_order;
    const double n0 = ctx.n0;
    const double s = std::sqrt(0.5 * n0);
    const double d = ctx.data_fraction;
    std::vector<double> c;
    for (int k = 1; k < m; ++k) c.push_back(phy::xi(ctx.lora, k).real() * r);
    auto integrand = [&](double z) {
        double logp = 0.0;
        for (double ck : c) {
            const double x = (z - ck) / s;
            logp += (x > 0.0) ? std::log1p(-specfun::gauss_q(x)) : std::log(specfun::norm_cdf(x));
        }
        const double miss = -std::expm1(logp);
        return miss * std::exp(-(z - d * r) * (z - d * r) / n0) / std::sqrt(kPi * n0);
    };
    quad::QuadOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-9;
    const double sn = std::sqrt(n0);
    const auto q = quad::integrate(integrand, d * r - 12.0 * sn, d * r + 12.0 * sn, opt);
    return {std::clamp(q.value, 0.0, 1.0), q.abs_error, q.converged};
}

QuadValue cond_ser_coh_quad(double r, const SerContext &ctx) {
    const double n0 = ctx.n0;
    const double s = std::sqrt(0.5 * n0);
    const double d = ctx.data_fraction;
    const double c = ctx.full_symbol ? 0.0 : ctx.xi_re;
    auto integrand = [&](double z) {
        const double lead = ctx.full_symbol ? 1.0 : 1.0 - 2.0 * specfun::gauss_q((z - c * r) / s);
        return lead * std::exp(-(z - d * r) * (z - d * r) / n0) / std::sqrt(kPi * n0);
    };
    quad::QuadOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-10;
    const double sn = std::sqrt(n0);
    const double lo = ctx.sigma_coh;
    const double hi = std::max(lo, d * r) + 12.0 * sn;
    const auto q = quad::integrate(integrand, lo, hi, opt);
    return {std::clamp(1.0 - q.value, 0.0, 1.0), q.abs_error, q.converged};
}

QuadValue average_over_pdf(const std::function<double(double)> &cond, const SerContext &ctx) {
    const auto &model = ctx.model;
    auto integrand = [&](double r) { return pdf_fas(r, model) * (1.0 - cond(r)); };
    quad::QuadOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-9;
    const double lo = ctx.delta_hat;
    const double hi = lo + 10.0 * std::sqrt(model.mu_sq);
    // split where the pdf peaks to help the adaptive rule
    const double mid = lo + std::sqrt(0.5 * model.mu_sq);
    const auto q1 = quad::integrate(integrand, lo, mid, opt);
    const auto q2 = quad::integrate(integrand, mid, hi, opt);
    return {1.0 - (q1.value + q2.value), q1.abs_error + q2.abs_error, q1.converged && q2.converged};
}

SerResult ser_ncoh(const SerContext &ctx) {
    const auto &model = ctx.model;
    const int b = model.num_blocks;
    const double mu2 = model.mu_sq;
    const double n0 = ctx.n0;
    const double d = ctx.data_fraction;
    const double sg = ctx.sigma_ncoh;
    const double x = ctx.xi_abs;
    const double dh = ctx.delta_hat;
    const double c2 = 2.0 / std::sqrt(kPi * n0);
    const double k8 = std::sqrt(kPi * n0 / 8.0);
    const auto &al = ctx.constants.alpha;
    Accumulator acc;
    for (double db : ctx.deltas) {
        for (int bt = 1; bt <= b; ++bt) {
            const double lam = bt / mu2;
            // averaged erfc((sg - D r)/sqrt(N0)) term, by parts
            const double a1 = std::exp(-lam * (dh - db) * (dh - db)) / (2.0 * lam) * std::erfc((sg - d * dh) / std::sqrt(n0)) +
                              d / (lam * std::sqrt(kPi * n0)) *
                                  gauss_tail(lam + d * d / n0, lam * db + d * sg / n0, lam * db * db + sg * sg / n0, dh);
            double inner = a1;
            if (!ctx.full_symbol) {
                const double a2 = gauss_tail(lam + (d * d + x * x) / n0, lam * db + sg * (d + x) / n0,
                                             lam * db * db + 2.0 * sg * sg / n0, dh);
                const double a3 = leakage_moment(lam, db, (d - x) * (d - x) / (2.0 * n0), 2.0 * sg, d + x,
                                                 std::sqrt(2.0 * n0), dh, ctx.constants);
                inner -= 2.0 * c2 * (al[0] * k8 * a3 + al[1] * (0.25 * n0 * a2 + 0.5 * (d + x) * k8 * a3));
            }
            acc.add(alt_binomial(b, bt) / mu2 * inner);
        }
    }
    SerResult res;
    res.raw = 1.0 - acc.value();
    res.value = std::clamp(res.raw, 0.0, 1.0);
    res.clipped = !(res.raw >= 0.0 && res.raw <= 1.0);
    const double rounding = std::numeric_limits<double>::epsilon() * (acc.abs_sum + 1.0);
    res.cancellation_warning = !(rounding <= 1e-6 * std::max(std::abs(res.raw), 1e-300));
    return res;
}

SerResult ser_coh(const SerContext &ctx) {
    const auto &model = ctx.model;
    const int b = model.num_blocks;
    const double mu2 = model.mu_sq;
    const double n0 = ctx.n0;
    const double d = ctx.data_fraction;
    const double sg = ctx.sigma_coh;
    const double c = ctx.xi_re;
    const double dh = ctx.delta_hat;
    const auto &k = ctx.constants;
    Accumulator acc;
    for (double db : ctx.deltas) {
        for (int bt = 1; bt <= b; ++bt) {
            const double lam = bt / mu2;
            const double a1 = std::exp(-lam * (dh - db) * (dh - db)) / (2.0 * lam) * std::erfc((sg - d * dh) / std::sqrt(n0)) +
                              d / (lam * std::sqrt(kPi * n0)) *
                                  gauss_tail(lam + d * d / n0, lam * db + d * sg / n0, lam * db * db + sg * sg / n0, dh);
            double inner = a1;
            if (!ctx.full_symbol) {
                for (int i = 0; i < 2; ++i) {
                    const double kk = 1.0 + 2.0 * k.beta_tilde[i];
                    const double g = d + 2.0 * k.beta_tilde[i] * c;
                    const double q = 2.0 * k.beta_tilde[i] * (d - c) * (d - c) / (n0 * kk);
                    const double ai = leakage_moment(lam, db, q, sg * kk, g, std::sqrt(n0 * kk), dh, k);
                    inner -= 2.0 * k.alpha_tilde[i] / std::sqrt(kk) * ai;
                }
            }
            acc.add(alt_binomial(b, bt) / mu2 * inner);
        }
    }
    SerResult res;
    res.raw = 1.0 - acc.value();
    res.value = std::clamp(res.raw, 0.0, 1.0);
    res.clipped = !(res.raw >= 0.0 && res.raw <= 1.0);
    const double rounding = std::numeric_limits<double>::epsilon() * (acc.abs_sum + 1.0);
    res.cancellation_warning = !(rounding <= 1e-6 * std::max(std::abs(res.raw), 1e-300));
    return res;
}

} // namespace lorafas::analytics

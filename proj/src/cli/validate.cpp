// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/cli.hpp"
#include "lorafas/quadrature.hpp"
#include "lorafas/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace lorafas::cli {

namespace {

SuiteResult finish(std::string name, double err, double tol) {
    SuiteResult r;
    r.name = std::move(name);
    r.max_error = err;
    r.tolerance = tol;
    r.pass = std::isfinite(err) && err <= tol;
    return r;
}

SuiteResult lambert_suite(double scale) {
    double worst = 0.0;
    const double e_inv = std::exp(-1.0);
    for (int i = 0; i <= 400; ++i) {
        const double x = -e_inv + 1e-12 + (100.0 + e_inv) * std::pow(i / 400.0, 3.0);
        const double w = specfun::lambert_w0(x);
        worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
    }
    return finish("lambert_w0 residual", worst, 1e-12 * scale);
}

SuiteResult marcum_suite(double scale) {
    // Q1(a,b) + Q1(b,a) = 1 + exp(-(a^2+b^2)/2) I0(ab), and Q1(0,b) = exp(-b^2/2)
    double worst = 0.0;
    for (double a = 0.0; a <= 12.0; a += 0.5) {
        for (double b = 0.0; b <= 12.0; b += 0.5) {
            const double lhs = specfun::marcum_q1(a, b) + specfun::marcum_q1(b, a);
            const double rhs = 1.0 + std::exp(-0.5 * (a - b) * (a - b)) * specfun::bessel_i0e(a * b);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        worst = std::max(worst, std::abs(specfun::marcum_q1(0.0, a) - std::exp(-0.5 * a * a)));
    }
    return finish("marcum_q1 symmetry identity", worst, 1e-9 * scale);
}

SuiteResult xi_suite(double scale) {
    double worst = 0.0;
    for (int sf : {7, 8}) {
        for (int sfp : {5, 6, 9}) {
            phy::LoRaParams p;
            p.sf = sf;
            p.sf_pilot = sfp;
            p.u_split = 4;
            for (int d = -(p.m() - 1); d < p.m(); ++d)
                worst = std::max(worst, std::abs(phy::xi(p, d) - phy::xi_direct(p, d)));
        }
    }
    return finish("leakage xi closed form vs sum", worst, 1e-12 * scale);
}

SuiteResult erfc_suite(double scale, analytics::ThetaConvention theta) {
    double worst = 0.0;
    for (int i = 0; i <= 300; ++i) {
        const double x = 3.0 * i / 300.0;
        worst = std::max(worst, std::abs(analytics::erfc_exp_approx(x, theta) - std::erfc(x)));
    }
    return finish("erfc exponential surrogate on [0,3]", worst, 5e-3 * scale);
}

SuiteResult marcum_approx_suite(double scale) {
    // M = 128, 1 - D = 1/16, -10 dB; the noise floor bounds the thresholds of interest
    phy::LoRaParams p;
    p.sf = 7;
    p.sf_pilot = 5;
    p.u_split = 4;
    p.snr_db = -10.0;
    const double n0 = 1.0 / (p.snr_linear() * p.m());
    const double x = std::abs(phy::xi(p, 1));
    const double sg = analytics::sigma_ncoh(p.m(), n0);
    const double s = std::sqrt(0.5 * n0);
    double worst = 0.0;
    for (int i = 0; i <= 55; ++i) {
        const double r = 0.25 + 0.05 * i;
        for (int j = 0; j <= 200; ++j) {
            const double z = sg + 0.01 * j;
            bool in_region = false;
            const double approx = analytics::marcum_q1_approx(x, r, z, n0, &in_region);
            if (!in_region) continue;
            worst = std::max(worst, std::abs(approx - specfun::marcum_q1(x * r / s, z / s)));
        }
    }
    return finish("Marcum two-term approximation, z >= noise floor", worst, 0.06 * scale);
}

std::vector<SuiteResult> closed_form_suites(double scale, analytics::ThetaConvention theta) {
    std::vector<SuiteResult> out;
    phy::LoRaParams p;
    p.sf = 8;
    p.sf_pilot = 6;
    p.u_split = 4;
    double worst_n = 0.0;
    double worst_c = 0.0;
    for (const std::vector<int> &blocks : {std::vector<int>{25, 19, 6}, std::vector<int>{13, 12, 12, 9, 4}}) {
        channel::BlockModel m;
        m.num_blocks = static_cast<int>(blocks.size());
        m.block_sizes = blocks;
        m.mu_sq = 0.97;
        for (double snr : {-14.0, -10.0, -6.0}) {
            p.snr_db = snr;
            const auto ctx = analytics::make_context(p, m, theta);
            const double qn = analytics::average_over_pdf([&](double r) { return analytics::cond_ser_ncoh(r, ctx); }, ctx)
                                  .value;
            const double qc = analytics::average_over_pdf([&](double r) { return analytics::cond_ser_coh(r, ctx); }, ctx)
                                  .value;
            worst_n = std::max(worst_n, std::abs(analytics::ser_ncoh(ctx).raw - qn) / qn);
            worst_c = std::max(worst_c, std::abs(analytics::ser_coh(ctx).raw - qc) / qc);
        }
    }
    out.push_back(finish("non-coherent closed form vs quadrature (rel)", worst_n, 0.02 * scale));
    out.push_back(finish("coherent closed form vs quadrature (rel)", worst_c, 0.02 * scale));
    return out;
}

SuiteResult cdf_pdf_suite(double scale) {
    double worst = 0.0;
    for (const std::vector<int> &blocks : {std::vector<int>{10}, std::vector<int>{25, 19, 6}}) {
        channel::BlockModel m;
        m.num_blocks = static_cast<int>(blocks.size());
        m.block_sizes = blocks;
        m.mu_sq = 0.9;
        double dhat = 0.0;
        for (int l : blocks) dhat = std::max(dhat, analytics::delta_b(m.mu_sq, l));
        // the CDF can jump at the largest shift; the density covers what lies above it
        const double base = analytics::cdf_fas(dhat, m);
        for (double r : {0.5, 1.0, 1.5, 2.5}) {
            if (r <= dhat) continue;
            const auto q = quad::integrate([&](double t) { return analytics::pdf_fas(t, m); }, dhat, r);
            worst = std::max(worst, std::abs(q.value - (analytics::cdf_fas(r, m) - base)));
        }
    }
    return finish("CDF equals integrated PDF", worst, 1e-7 * scale);
}

} // namespace

std::vector<SuiteResult> run_validation(double tol_scale, analytics::ThetaConvention theta) {
    std::vector<SuiteResult> out;
    out.push_back(lambert_suite(tol_scale));
    out.push_back(marcum_suite(tol_scale));
    out.push_back(xi_suite(tol_scale));
    out.push_back(erfc_suite(tol_scale, theta));
    out.push_back(marcum_approx_suite(tol_scale));
    for (auto &r : closed_form_suites(tol_scale, theta)) out.push_back(std::move(r));
    out.push_back(cdf_pdf_suite(tol_scale));
    return out;
}

int validate(double tol_scale, analytics::ThetaConvention theta, std::ostream &out) {
    if (!(tol_scale > 0.0)) {
        out << "lorafas validate: --tol-scale must be positive\n";
        return 2;
    }
    int failed = 0;
    for (const auto &r : run_validation(tol_scale, theta)) {
        out << (r.pass ? "PASS " : "FAIL ") << r.name << ": max error " << format_number(r.max_error)
            << " (tolerance " << format_number(r.tolerance) << ", margin "
            << format_number(r.tolerance - r.max_error) << ")\n";
        if (!r.pass) ++failed;
    }
    out << (failed == 0 ? "all suites passed\n" : std::to_string(failed) + " suite(s) failed\n");
    return failed == 0 ? 0 : 1;
}

} // namespace lorafas::cli

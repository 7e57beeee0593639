// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include "lorafas/fas_channel.hpp"
#include "lorafas/lora_phy.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace lorafas::analytics {

/// Sign convention of the exponential erfc surrogate
/// erfc(x) ~ 2 exp(s (T1 x^2 + T2 x + T3)).
enum class ThetaConvention {
    kDecaying, ///< s = -1, the convention that actually tracks erfc
    kAsPrinted ///< s = +1, grows with x; kept for diagnostics only
};

struct AnalyticConstants {
    std::array<double, 2> alpha{0.25, 0.0};
    std::array<double, 2> alpha_tilde{1.0 / 12.0, 0.25};
    std::array<double, 2> beta_tilde{0.5, 2.0 / 3.0};
    std::array<double, 3> theta{0.7640, 0.7640 * 1.41421356237309504880, 0.6964};
    double euler_gamma = 0.57721566490153286061;
    ThetaConvention convention = ThetaConvention::kDecaying;
};

/// Everything the closed forms need for one operating point. Magnitudes are
/// normalized to unit symbol energy, so the per-bin noise power is 1/(Gamma M).
struct SerContext {
    phy::LoRaParams lora;
    channel::BlockModel model;
    int m_order = 0;
    double n0 = 0.0;
    double data_fraction = 1.0;
    bool full_symbol = false;
    double xi_abs = 0.0; ///< |xi_{+-1}|
    double xi_re = 0.0;  ///< Re(xi_{+-1})
    double sigma_ncoh = 0.0;
    double sigma_coh = 0.0;
    std::vector<double> deltas;
    double delta_hat = 0.0;
    AnalyticConstants constants;
};

SerContext make_context(const phy::LoRaParams &lora, const channel::BlockModel &model,
                        ThetaConvention convention = ThetaConvention::kDecaying);

/// Shift of the best-port magnitude for one block of l_b ports.
double delta_b(double mu_sq, int l_b);
double cdf_block(double r, double mu_sq, int l_b);
double cdf_fas(double r, const channel::BlockModel &model);
double pdf_fas(double r, const channel::BlockModel &model);

/// Effective noise floor: expected largest of the m_order - excluded noise bins.
double sigma_ncoh(int m_order, double n0, int excluded = 3);
double sigma_coh(int m_order, double n0, int excluded = 3);

/// Two-term approximation of Q1(|xi| r / s, z / s), s = sqrt(n0/2).
/// Sets *in_region to whether z >= |xi| r (the region where it is meant to hold).
double marcum_q1_approx(double xi_abs, double r, double z, double n0, bool *in_region = nullptr);

struct ApproxEnvelope {
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    int points = 0;
};

/// Compares the approximation with the exact Marcum function on the grid,
/// skipping points outside the validity region.
ApproxEnvelope marcum_approx_diagnostic(double xi_abs, double n0, std::span<const double> r_grid,
                                        std::span<const double> z_grid);

double erfc_exp_approx(double x, ThetaConvention convention = ThetaConvention::kDecaying);

double cond_ser_ncoh(double r, const SerContext &ctx);
double cond_ser_coh(double r, const SerContext &ctx);

struct QuadValue {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
};

/// Exact conditional error probability of the non-coherent detector with all
/// M - 1 leakage bins, by quadrature over the Rician envelope of the correct bin.
QuadValue cond_ser_exact_quad(double r, const SerContext &ctx);
/// Exact conditional error probability of the coherent detector (perfect phase).
QuadValue cond_ser_coh_exact_quad(double r, const SerContext &ctx);
/// Quadrature of the coherent conditional model before the Gaussian-tail surrogate:
/// noise floor step at sigma_coh plus the two +-1 leakage bins.
QuadValue cond_ser_coh_quad(double r, const SerContext &ctx);

/// 1 - int_{delta_hat}^inf pdf_fas(r) (1 - cond(r)) dr, the same averaging the
/// closed forms perform.
QuadValue average_over_pdf(const std::function<double(double)> &cond, const SerContext &ctx);

struct SerResult {
    double value = 0.0;
    double raw = 0.0;
    bool clipped = false;
    bool cancellation_warning = false;
};

SerResult ser_ncoh(const SerContext &ctx);
SerResult ser_coh(const SerContext &ctx);

} // namespace lorafas::analytics

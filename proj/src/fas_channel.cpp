// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/fas_channel.hpp"
#include "lorafas/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lorafas::channel {

void ApertureSpec::validate() const {
    if (!(w_lambda > 0.0) || !std::isfinite(w_lambda)) throw std::invalid_argument("ApertureSpec: W must be positive");
    if (num_ports < 1) throw std::invalid_argument("ApertureSpec: L must be at least 1");
}

SymmetricEigen jacobi_eigen(std::span<const double> in, int n, int max_sweeps) {
    if (n < 1 || static_cast<int>(in.size()) != n * n) throw std::invalid_argument("jacobi_eigen: bad matrix size");
    std::vector<double> a(in.begin(), in.end());
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
    auto A = [&](int i, int j) -> double & { return a[static_cast<std::size_t>(i) * n + j]; };
    auto V = [&](int i, int j) -> double & { return v[static_cast<std::size_t>(i) * n + j]; };

    double fro = 0.0;
    for (double x : a) fro += x * x;
    SymmetricEigen out;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
        if (off <= 1e-30 * fro) break;
        out.sweeps = sweep + 1;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return A(x, x) > A(y, y); });
    out.values.resize(n);
    out.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = A(order[k], order[k]);
        for (int i = 0; i < n; ++i) out.vectors[static_cast<std::size_t>(i) * n + k] = V(i, order[k]);
    }
    return out;
}

ClarkeCorrelation decompose_correlation(std::vector<double> matrix, int n) {
    ClarkeCorrelation c;
    c.size = n;
    c.matrix = std::move(matrix);
    SymmetricEigen e = jacobi_eigen(c.matrix, n);
    c.eigenvectors = std::move(e.vectors);
    c.eigenvalues = std::move(e.values);
    for (double &l : c.eigenvalues) {
        if (l < 0.0) {
            c.clamped_mass += -l;
            l = 0.0;
        }
    }
    c.sqrt_factor.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
        const double s = std::sqrt(c.eigenvalues[k]);
        if (s == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            const double vik = c.eigenvectors[static_cast<std::size_t>(i) * n + k] * s;
            for (int j = 0; j < n; ++j)
                c.sqrt_factor[static_cast<std::size_t>(i) * n + j] +=
                    vik * c.eigenvectors[static_cast<std::size_t>(j) * n + k];
        }
    }
    return c;
}

ClarkeCorrelation clarke_matrix(const ApertureSpec &spec) {
    spec.validate();
    const int n = spec.num_ports;
    std::vector<double> m(static_cast<std::size_t>(n) * n, 1.0);
    if (n > 1) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m[static_cast<std::size_t>(i) * n + j] =
                    specfun::sinc(2.0 * specfun::kPi * (i - j) * spec.w_lambda / (n - 1));
    }
    return decompose_correlation(std::move(m), n);
}

MuSelection select_mu_sq(std::span<const double> eigenvalues, double rho_threshold) {
    double above = 0.0;
    double total = 0.0;
    MuSelection s;
    for (double l : eigenvalues) {
        total += l;
        if (l > rho_threshold) {
            above += l;
            ++s.num_above;
        }
    }
    s.degenerate = s.num_above == 0;
    const double raw = total > 0.0 ? above / total : 0.0;
    s.mu_sq = std::clamp(raw, 1e-6, 1.0 - 1e-6);
    return s;
}

MuSelection select_mu_sq(const ClarkeCorrelation &corr, double rho_threshold) {
    return select_mu_sq(corr.eigenvalues, rho_threshold);
}

void BlockModel::validate() const {
    if (num_blocks < 1 || static_cast<int>(block_sizes.size()) != num_blocks)
        throw std::invalid_argument("BlockModel: block count mismatch");
    for (int s : block_sizes)
        if (s < 1) throw std::invalid_argument("BlockModel: every block needs at least one port");
    if (!(mu_sq > 0.0 && mu_sq < 1.0)) throw std::invalid_argument("BlockModel: mu^2 must lie in (0, 1)");
}

int BlockModel::total_ports() const { return std::accumulate(block_sizes.begin(), block_sizes.end(), 0); }

std::vector<double> BlockModel::eigenvalues() const {
    std::vector<double> ev;
    for (int s : block_sizes) {
        ev.push_back((s - 1) * mu_sq + 1.0);
        for (int i = 1; i < s; ++i) ev.push_back(1.0 - mu_sq);
    }
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

std::vector<double> BlockModel::implied_correlation() const {
    const int n = total_ports();
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    int start = 0;
    for (int s : block_sizes) {
        for (int i = start; i < start + s; ++i)
            for (int j = start; j < start + s; ++j) m[static_cast<std::size_t>(i) * n + j] = (i == j) ? 1.0 : mu_sq;
        start += s;
    }
    return m;
}

BlockModel fit_blocks(std::span<const double> eigenvalues, double mu_sq, double rho_threshold) {
    if (!(mu_sq > 0.0 && mu_sq < 1.0)) throw std::invalid_argument("fit_blocks: mu^2 must lie in (0, 1)");
    const int l = static_cast<int>(eigenvalues.size());
    if (l < 1) throw std::invalid_argument("fit_blocks: empty eigenvalue list");
    BlockModel m;
    m.mu_sq = mu_sq;
    m.rho_threshold = rho_threshold;
    m.block_sizes.clear();
    for (double rho : eigenvalues) {
        if (rho > rho_threshold) m.block_sizes.push_back(std::max(1, static_cast<int>(std::lround((rho - 1.0) / mu_sq)) + 1));
    }
    if (static_cast<int>(m.block_sizes.size()) > l) throw std::invalid_argument("fit_blocks: more blocks than ports");
    if (m.block_sizes.empty()) {
        // nothing above threshold: ports are effectively independent
        m.block_sizes.assign(l, 1);
    }
    int diff = l - std::accumulate(m.block_sizes.begin(), m.block_sizes.end(), 0);
    if (diff > 0) {
        *std::max_element(m.block_sizes.begin(), m.block_sizes.end()) += diff;
    }
    while (diff < 0) {
        // trim the largest block first, spilling to the next one at size 1
        auto it = std::max_element(m.block_sizes.begin(), m.block_sizes.end());
        if (*it <= 1) throw std::invalid_argument("fit_blocks: cannot reduce blocks to fit L");
        const int take = std::min(-diff, *it - 1);
        *it -= take;
        diff += take;
    }
    m.num_blocks = static_cast<int>(m.block_sizes.size());
    m.validate();
    return m;
}

BlockModel fit_blocks(const ClarkeCorrelation &corr, double mu_sq, double rho_threshold) {
    return fit_blocks(corr.eigenvalues, mu_sq, rho_threshold);
}

std::pair<int, cplx> best_port(std::span<const cplx> gains) {
    if (gains.empty()) throw std::invalid_argument("best_port: empty gain vector");
    int best = 0;
    double best_v = std::norm(gains[0]);
    for (std::size_t i = 1; i < gains.size(); ++i) {
        const double v = std::norm(gains[i]);
        if (v > best_v) {
            best_v = v;
            best = static_cast<int>(i);
        }
    }
    return {best, gains[best]};
}

void sample_clarke(const ClarkeCorrelation &corr, rng::Stream &stream, ChannelRealization &out,
                   std::vector<cplx> &scratch) {
    const int n = corr.size;
    // h = V diag(sqrt(lambda)) g has the same law as the symmetric square root
    // and lets zero-mass eigen-directions be skipped.
    scratch.resize(n);
    int rank = 0;
    for (int k = 0; k < n; ++k) {
        if (corr.eigenvalues[k] <= 0.0) break;
        scratch[k] = stream.complex_normal(1.0) * std::sqrt(corr.eigenvalues[k]);
        rank = k + 1;
    }
    out.gains.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double *row = &corr.eigenvectors[static_cast<std::size_t>(i) * n];
        double re = 0.0, im = 0.0;
        for (int k = 0; k < rank; ++k) {
            re += row[k] * scratch[k].real();
            im += row[k] * scratch[k].imag();
        }
        out.gains[i] = {re, im};
    }
    const auto [idx, g] = best_port(out.gains);
    out.best_port = idx;
    out.best_gain = g;
}

ChannelRealization sample_clarke(const ClarkeCorrelation &corr, rng::Stream &stream) {
    ChannelRealization out;
    std::vector<cplx> scratch;
    sample_clarke(corr, stream, out, scratch);
    return out;
}

void sample_block_model(const BlockModel &model, rng::Stream &stream, ChannelRealization &out) {
    const double a = std::sqrt(1.0 - model.mu_sq);
    const double b = std::sqrt(model.mu_sq);
    out.gains.clear();
    out.gains.reserve(model.total_ports());
    for (int s : model.block_sizes) {
        const cplx common = stream.complex_normal(1.0);
        for (int i = 0; i < s; ++i) out.gains.push_back(a * stream.complex_normal(1.0) + b * common);
    }
    const auto [idx, g] = best_port(out.gains);
    out.best_port = idx;
    out.best_gain = g;
}

ChannelRealization sample_block_model(const BlockModel &model, rng::Stream &stream) {
    ChannelRealization out;
    sample_block_model(model, stream, out);
    return out;
}

cplx estimate_ls(std::span<const cplx> received_pilot, std::span<const cplx> pilot_tx, LsConvention convention) {
    if (received_pilot.size() != pilot_tx.size()) throw std::invalid_argument("estimate_ls: length mismatch");
    double energy = 0.0;
    cplx num = 0.0;
    for (std::size_t i = 0; i < pilot_tx.size(); ++i) {
        energy += std::norm(pilot_tx[i]);
        if (convention == LsConvention::kConjugateReceived)
            num += std::conj(received_pilot[i]) * pilot_tx[i];
        else
            num += received_pilot[i] * std::conj(pilot_tx[i]);
    }
    if (!(energy > 0.0)) throw std::invalid_argument("estimate_ls: zero-energy pilot");
    return num / energy;
}

} // namespace lorafas::channel

// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/montecarlo.hpp"
#include "lorafas/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace lorafas::mc {

void TrialConfig::validate() const {
    lora.validate();
    aperture.validate();
    if (num_trials < 1) throw std::invalid_argument("TrialConfig: num_trials must be at least 1");
    if (workers < 1) throw std::invalid_argument("TrialConfig: workers must be at least 1");
    if (batch_size < 1) throw std::invalid_argument("TrialConfig: batch_size must be at least 1");
    if (max_rel_ci < 0.0) throw std::invalid_argument("TrialConfig: max_rel_ci must be non-negative");
    if (csi == CsiKind::kLeastSquares && lora.full_symbol())
        throw std::invalid_argument("TrialConfig: least-squares CSI needs an embedded pilot");
    if (block_mu_sq >= 1.0) throw std::invalid_argument("TrialConfig: block_mu_sq must be below 1");
}

TrialRunner::TrialRunner(const TrialConfig &cfg) : cfg_(cfg), modem_(cfg.lora) {
    cfg_.validate();
    corr_ = channel::clarke_matrix(cfg_.aperture);
    const double mu = cfg_.block_mu_sq > 0.0 ? cfg_.block_mu_sq : channel::select_mu_sq(corr_).mu_sq;
    model_ = channel::fit_blocks(corr_, mu);
    const double es = cfg_.lora.symbol_energy();
    amp_ = std::sqrt(es);
    n0_ = cfg_.lora.noise_psd;
    for (const cplx &x : modem_.pilot()) pilot_tx_.push_back(amp_ * x);
}

TrialOutcome TrialRunner::run(std::uint64_t trial, Workspace &ws) const {
    const std::uint64_t seed = cfg_.seed;
    const int m_order = modem_.m();
    const int np = modem_.prefix();

    rng::Stream ch(seed, trial, rng::Tag::kChannel);
    if (cfg_.channel_kind == ChannelKind::kClarke)
        channel::sample_clarke(corr_, ch, ws.channel, ws.scratch);
    else
        channel::sample_block_model(model_, ch, ws.channel);

    int port = ws.channel.best_port;
    double phase = std::arg(ws.channel.best_gain);
    if (cfg_.csi == CsiKind::kLeastSquares) {
        // one reconstructed pilot per port, flat fading over the scan
        rng::Stream pn(seed, trial, rng::Tag::kPilotNoise);
        const std::size_t plen = pilot_tx_.size();
        ws.pilot_rx.resize(plen);
        double best = -1.0;
        cplx best_est = 0.0;
        for (std::size_t l = 0; l < ws.channel.gains.size(); ++l) {
            const cplx h = ws.channel.gains[l];
            for (std::size_t n = 0; n < plen; ++n) ws.pilot_rx[n] = h * pilot_tx_[n] + pn.complex_normal(n0_);
            const cplx est = channel::estimate_ls(ws.pilot_rx, pilot_tx_, channel::LsConvention::kConjugatePilot);
            if (std::norm(est) > best) {
                best = std::norm(est);
                best_est = est;
                port = static_cast<int>(l);
            }
        }
        phase = std::arg(best_est);
    }
    const cplx h = ws.channel.gains[port];

    rng::Stream sym(seed, trial, rng::Tag::kSymbol);
    TrialOutcome out;
    out.sent = static_cast<int>(sym.uniform_int(static_cast<std::uint32_t>(m_order)));
    const int u = 1 + static_cast<int>(sym.uniform_int(static_cast<std::uint32_t>(cfg_.lora.u_split)));

    ws.rx.resize(m_order);
    ws.bins.resize(m_order);
    ws.fill.resize(np);
    modem_.transmit(out.sent, u, ws.rx);
    rng::Stream noise(seed, trial, rng::Tag::kNoise);
    const cplx g = amp_ * h;
    for (int n = 0; n < m_order; ++n) ws.rx[n] = g * ws.rx[n] + noise.complex_normal(n0_);
    rng::Stream fill(seed, trial, rng::Tag::kNoiseFill);
    // dechirping scales white noise power by 1/M
    for (int n = 0; n < np; ++n) ws.fill[n] = fill.complex_normal(n0_ / m_order);
    modem_.demodulate(ws.rx, ws.fill, ws.bins);
    if (cfg_.wants_ncoh()) out.decided_ncoh = phy::detect_noncoherent(ws.bins);
    if (cfg_.wants_coh()) out.decided_coh = phy::detect_coherent(ws.bins, phase);
    return out;
}

TrialOutcome run_trial(const TrialConfig &cfg, std::uint64_t trial_index) {
    TrialRunner runner(cfg);
    TrialRunner::Workspace ws;
    return runner.run(trial_index, ws);
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

SerEstimate make_estimate(std::uint64_t errors, std::uint64_t trials, int m_order) {
    SerEstimate e;
    e.trials_used = trials;
    e.errors_seen = errors;
    if (trials == 0) return e;
    e.ser = static_cast<double>(errors) / static_cast<double>(trials);
    e.ber = phy::ser_to_ber(m_order, e.ser);
    if (errors == 0) {
        e.undersampled = true;
        e.ci_lo = 0.0;
        e.ci_hi = std::min(1.0, 3.0 / static_cast<double>(trials));
    } else {
        std::tie(e.ci_lo, e.ci_hi) = wilson_interval(errors, trials);
        e.ci_lo = std::min(e.ci_lo, e.ser);
        e.ci_hi = std::max(e.ci_hi, e.ser);
    }
    return e;
}

Counts run_batches(std::uint64_t total, std::uint64_t batch_size, int workers,
                   const std::function<Counts(std::uint64_t, std::uint64_t)> &batch,
                   const std::function<bool(const Counts &)> &stop) {
    Counts acc;
    const std::uint64_t num_batches = (total + batch_size - 1) / batch_size;
    std::uint64_t next = 0;
    workers = std::max(1, workers);
    while (next < num_batches) {
        const std::uint64_t wave = std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), num_batches - next);
        std::vector<Counts> results(wave);
        std::vector<std::exception_ptr> errors(wave);
        auto work = [&](std::uint64_t i) {
            try {
                const std::uint64_t lo = (next + i) * batch_size;
                const std::uint64_t hi = std::min(total, lo + batch_size);
                results[i] = batch(lo, hi);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        };
        if (wave == 1) {
            work(0);
        } else {
            std::vector<std::thread> threads;
            for (std::uint64_t i = 1; i < wave; ++i) threads.emplace_back(work, i);
            work(0);
            for (auto &t : threads) t.join();
        }
        for (auto &e : errors)
            if (e) std::rethrow_exception(e);
        for (const Counts &c : results) {
            acc += c;
            if (stop(acc)) return acc;
        }
        next += wave;
    }
    return acc;
}

McResult estimate_ser(const TrialConfig &cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrialRunner runner(cfg);
    const int m_order = cfg.lora.m();
    auto batch = [&](std::uint64_t lo, std::uint64_t hi) {
        TrialRunner::Workspace ws;
        Counts c;
        for (std::uint64_t t = lo; t < hi; ++t) {
            const TrialOutcome o = runner.run(t, ws);
            ++c.trials;
            if (o.decided_ncoh >= 0 && o.decided_ncoh != o.sent) ++c.errors_ncoh;
            if (o.decided_coh >= 0 && o.decided_coh != o.sent) ++c.errors_coh;
        }
        return c;
    };
    auto rel_ok = [&](std::uint64_t k, std::uint64_t n) {
        if (k == 0) return false;
        const auto [lo, hi] = wilson_interval(k, n);
        return 0.5 * (hi - lo) / (static_cast<double>(k) / n) <= cfg.max_rel_ci;
    };
    auto stop = [&](const Counts &c) {
        if (cfg.max_rel_ci > 0.0) {
            return (!cfg.wants_ncoh() || rel_ok(c.errors_ncoh, c.trials)) &&
                   (!cfg.wants_coh() || rel_ok(c.errors_coh, c.trials));
        }
        if (cfg.min_errors == 0) return false;
        return (!cfg.wants_ncoh() || c.errors_ncoh >= cfg.min_errors) &&
               (!cfg.wants_coh() || c.errors_coh >= cfg.min_errors);
    };
    const Counts total = run_batches(cfg.num_trials, cfg.batch_size, cfg.workers, batch, stop);
    McResult r;
    if (cfg.wants_ncoh()) r.ncoh = make_estimate(total.errors_ncoh, total.trials, m_order);
    if (cfg.wants_coh()) r.coh = make_estimate(total.errors_coh, total.trials, m_order);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<double> best_port_magnitudes(const channel::ApertureSpec &aperture, ChannelKind kind,
                                         const channel::BlockModel &block, std::size_t draws, std::uint64_t seed) {
    std::vector<double> out;
    out.reserve(draws);
    channel::ChannelRealization ch;
    std::vector<cplx> scratch;
    if (kind == ChannelKind::kClarke) {
        const auto corr = channel::clarke_matrix(aperture);
        for (std::size_t i = 0; i < draws; ++i) {
            rng::Stream s(seed, i, rng::Tag::kChannel);
            channel::sample_clarke(corr, s, ch, scratch);
            out.push_back(std::abs(ch.best_gain));
        }
    } else {
        for (std::size_t i = 0; i < draws; ++i) {
            rng::Stream s(seed, i, rng::Tag::kChannel);
            channel::sample_block_model(block, s, ch);
            out.push_back(std::abs(ch.best_gain));
        }
    }
    return out;
}

DistributionFit compare_distribution(std::vector<double> samples, const channel::BlockModel &model,
                                     double bin_width) {
    if (samples.empty()) throw std::invalid_argument("compare_distribution: no samples");
    if (!(bin_width > 0.0)) throw std::invalid_argument("compare_distribution: bin width must be positive");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    DistributionFit fit;
    fit.draws = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = analytics::cdf_fas(samples[i], model);
        fit.max_cdf_dev = std::max({fit.max_cdf_dev, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    const double top = samples.back() + bin_width;
    const auto bins = static_cast<std::size_t>(std::ceil(top / bin_width));
    std::vector<double> hist(bins, 0.0);
    for (double x : samples) hist[std::min(bins - 1, static_cast<std::size_t>(x / bin_width))] += 1.0;
    // analytic density integrated over each bin with 8-point midpoint sub-sampling
    for (std::size_t k = 0; k < bins; ++k) {
        double mass = 0.0;
        for (int j = 0; j < 8; ++j) mass += analytics::pdf_fas((k + (j + 0.5) / 8.0) * bin_width, model);
        mass *= bin_width / 8.0;
        fit.pdf_l1 += std::abs(mass - hist[k] / n);
    }
    return fit;
}

std::string axis_name(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::kSnr: return "snr";
    case SweepAxis::kNumPorts: return "num_ports";
    case SweepAxis::kAperture: return "aperture";
    case SweepAxis::kPilotFraction: return "pilot_fraction";
    case SweepAxis::kPilotLength: return "pilot_length";
    }
    return "unknown";
}

std::optional<SweepAxis> parse_axis(const std::string &name) {
    for (SweepAxis a : {SweepAxis::kSnr, SweepAxis::kNumPorts, SweepAxis::kAperture, SweepAxis::kPilotFraction,
                        SweepAxis::kPilotLength})
        if (axis_name(a) == name) return a;
    return std::nullopt;
}

TrialConfig apply_axis(TrialConfig cfg, SweepAxis axis, double value) {
    switch (axis) {
    case SweepAxis::kSnr: cfg.lora.snr_db = value; break;
    case SweepAxis::kNumPorts:
        if (value < 1.0 || value != std::floor(value)) throw std::invalid_argument("num_ports must be a positive integer");
        cfg.aperture.num_ports = static_cast<int>(value);
        break;
    case SweepAxis::kAperture: cfg.aperture.w_lambda = value; break;
    case SweepAxis::kPilotFraction: cfg.lora.pilot_fraction = value; break;
    case SweepAxis::kPilotLength: {
        const int sfp = static_cast<int>(std::lround(std::log2(value)));
        if (value < 1.0 || (1 << sfp) != static_cast<int>(value))
            throw std::invalid_argument("pilot_length must be a power of two");
        cfg.lora.sf_pilot = sfp;
        cfg.lora.pilot_fraction = -1.0;
        break;
    }
    }
    cfg.validate();
    return cfg;
}

channel::BlockModel analytic_model(const channel::ApertureSpec &aperture, const AnalyticOptions &opt) {
    const auto corr = channel::clarke_matrix(aperture);
    const double mu = opt.mu_source == MuSource::kFixed ? opt.fixed_mu_sq : channel::select_mu_sq(corr).mu_sq;
    return channel::fit_blocks(corr, mu);
}

std::vector<SweepPoint> sweep(const TrialConfig &tmpl, SweepAxis axis, std::span<const double> values,
                              const AnalyticOptions &opt) {
    std::vector<SweepPoint> out;
    for (double v : values) {
        SweepPoint pt;
        pt.axis_value = v;
        try {
            const TrialConfig cfg = apply_axis(tmpl, axis, v);
            pt.mc = estimate_ser(cfg);
            if (opt.enabled) {
                const auto ctx = analytics::make_context(cfg.lora, analytic_model(cfg.aperture, opt));
                pt.analytic_ncoh = analytics::ser_ncoh(ctx).value;
                pt.analytic_coh = analytics::ser_coh(ctx).value;
            }
        } catch (const std::exception &e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

} // namespace lorafas::mc

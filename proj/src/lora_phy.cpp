// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/lora_phy.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace lorafas::phy {
namespace {

constexpr double kTwoPi = 6.283185307179586477;

// exp(j 2 pi num / den) with num already reduced
cplx unit_phase(std::int64_t num, std::int64_t den) {
    const double a = kTwoPi * static_cast<double>(num) / static_cast<double>(den);
    return {std::cos(a), std::sin(a)};
}

std::int64_t pos_mod(std::int64_t a, std::int64_t n) {
    const std::int64_t r = a % n;
    return r < 0 ? r + n : r;
}

// x_m[n] phase numerator over 2M: n^2 - n M + 2 m n
cplx chirp_sample(int m_order, int m, int n) {
    const std::int64_t two_m = 2 * static_cast<std::int64_t>(m_order);
    const std::int64_t nn = n;
    const std::int64_t num = pos_mod(nn * nn - nn * m_order + 2 * static_cast<std::int64_t>(m) * nn, two_m);
    return unit_phase(num, two_m) / std::sqrt(static_cast<double>(m_order));
}

cplx pilot_sample(int m_order, int p_len, int np) {
    const std::int64_t two_p = 2 * static_cast<std::int64_t>(p_len);
    const std::int64_t k = np;
    const std::int64_t num = pos_mod(k * k - k * p_len, two_p);
    return unit_phase(num, two_p) / std::sqrt(static_cast<double>(m_order));
}

} // namespace

void LoRaParams::validate() const {
    if (sf < 7 || sf > 12) throw std::invalid_argument("LoRaParams: sf must lie in 7..12, got " + std::to_string(sf));
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("LoRaParams: bandwidth_hz must be positive");
    if (!(noise_psd > 0.0)) throw std::invalid_argument("LoRaParams: noise_psd must be positive");
    if (!std::isfinite(snr_db)) throw std::invalid_argument("LoRaParams: snr_db must be finite");
    if (u_split < 1) throw std::invalid_argument("LoRaParams: u_split must be positive");
    if (pilot_fraction >= 0.0) {
        if (!(pilot_fraction < 1.0)) throw std::invalid_argument("LoRaParams: pilot_fraction must lie in [0, 1)");
        return;
    }
    if (sf_pilot < 1 || sf_pilot > 12)
        throw std::invalid_argument("LoRaParams: sf_pilot must lie in 1..12, got " + std::to_string(sf_pilot));
    const long long mm = m();
    const long long pp = 1LL << sf_pilot;
    if (pp % u_split != 0) throw std::invalid_argument("LoRaParams: P/U must be an integer");
    if ((u_split * mm) % pp != 0) throw std::invalid_argument("LoRaParams: U*M/P must be an integer");
    if (!(static_cast<long long>(u_split) * mm > pp)) throw std::invalid_argument("LoRaParams: need U > P/M");
}

int LoRaParams::prefix_length() const {
    if (pilot_fraction >= 0.0) return static_cast<int>(std::lround(pilot_fraction * m()));
    return (1 << sf_pilot) / u_split;
}

int LoRaParams::pilot_length() const {
    if (pilot_fraction >= 0.0) return prefix_length() * u_split;
    return 1 << sf_pilot;
}

double LoRaParams::data_fraction() const { return 1.0 - static_cast<double>(prefix_length()) / m(); }

double LoRaParams::snr_linear() const { return std::pow(10.0, snr_db / 10.0); }

double LoRaParams::symbol_energy() const { return snr_linear() * noise_psd * m(); }

double LoRaParams::symbol_duration() const { return m() / bandwidth_hz; }

SymbolWaveform basic_chirp(const LoRaParams &p) { return modulate(p, 0); }

SymbolWaveform modulate(const LoRaParams &p, int m) {
    p.validate();
    const int mm = p.m();
    if (m < 0 || m >= mm) throw std::out_of_range("modulate: symbol value out of range");
    SymbolWaveform w;
    w.samples.resize(mm);
    for (int n = 0; n < mm; ++n) w.samples[n] = chirp_sample(mm, m, n);
    w.payload = m;
    return w;
}

std::vector<cplx> pilot_sequence(const LoRaParams &p) {
    p.validate();
    const int plen = p.pilot_length();
    std::vector<cplx> x(plen);
    for (int n = 0; n < plen; ++n) x[n] = pilot_sample(p.m(), plen, n);
    return x;
}

SymbolWaveform embed_pilot(const LoRaParams &p, int m, int u) {
    if (u < 1 || u > p.u_split) throw std::out_of_range("embed_pilot: cycle index must lie in 1..U");
    SymbolWaveform w = modulate(p, m);
    const int np = p.prefix_length();
    const int plen = p.pilot_length();
    for (int n = 0; n < np; ++n) w.samples[n] = pilot_sample(p.m(), plen, n + (u - 1) * np);
    w.cycle_index = np > 0 ? u : 0;
    return w;
}

std::vector<cplx> reconstruct_pilot(const LoRaParams &p, std::span<const std::vector<cplx>> symbols) {
    if (static_cast<int>(symbols.size()) != p.u_split)
        throw std::invalid_argument("reconstruct_pilot: need exactly U symbols");
    const int np = p.prefix_length();
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(np) * p.u_split);
    for (const auto &s : symbols) {
        if (static_cast<int>(s.size()) != p.m()) throw std::invalid_argument("reconstruct_pilot: symbol length");
        out.insert(out.end(), s.begin(), s.begin() + np);
    }
    return out;
}

cplx xi(const LoRaParams &p, int d) {
    const int mm = p.m();
    const int np = p.prefix_length();
    const std::int64_t dm = pos_mod(d, mm);
    if (dm == 0) return static_cast<double>(mm - np) / mm;
    if (np == 0) return 0.0;
    const double s1 = std::sin(M_PI * static_cast<double>(pos_mod(dm * np, 2 * static_cast<std::int64_t>(mm))) / mm);
    const double s2 = std::sin(M_PI * static_cast<double>(dm) / mm);
    // phase pi (d (Np - 1)/M + 1), numerator over 2M
    const std::int64_t num = pos_mod(dm * (np - 1) + mm, 2 * static_cast<std::int64_t>(mm));
    return (s1 / s2 / mm) * unit_phase(num, 2 * static_cast<std::int64_t>(mm));
}

cplx xi_direct(const LoRaParams &p, int d) {
    const int mm = p.m();
    const std::int64_t dm = pos_mod(d, mm);
    cplx acc = 0.0;
    for (int n = p.prefix_length(); n < mm; ++n) acc += unit_phase(pos_mod(dm * n, mm), mm);
    return acc / static_cast<double>(mm);
}

int detect_noncoherent(std::span<const cplx> bins) {
    int best = 0;
    double best_v = -1.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const double v = std::norm(bins[k]);
        if (v > best_v) {
            best_v = v;
            best = static_cast<int>(k);
        }
    }
    return best;
}

int detect_noncoherent(const DemodOutput &d) { return detect_noncoherent(d.bins); }

int detect_coherent(std::span<const cplx> bins, double channel_phase) {
    if (!std::isfinite(channel_phase)) throw std::invalid_argument("detect_coherent: phase must be finite");
    const cplx rot = std::polar(1.0, -channel_phase);
    int best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const double v = (bins[k] * rot).real();
        if (v > best_v) {
            best_v = v;
            best = static_cast<int>(k);
        }
    }
    return best;
}

int detect_coherent(const DemodOutput &d, double channel_phase) { return detect_coherent(d.bins, channel_phase); }

DemodOutput dechirp_dft(const LoRaParams &p, std::span<const cplx> received, std::span<const cplx> noise_fill,
                        std::optional<double> channel_phase) {
    p.validate();
    const int mm = p.m();
    const int np = p.prefix_length();
    if (static_cast<int>(received.size()) != mm) throw std::invalid_argument("dechirp_dft: received length must be M");
    if (static_cast<int>(noise_fill.size()) != np)
        throw std::invalid_argument("dechirp_dft: noise_fill length must be the pilot prefix length");
    DemodOutput out;
    out.bins.resize(mm);
    for (int n = 0; n < np; ++n) out.bins[n] = noise_fill[n];
    for (int n = np; n < mm; ++n) out.bins[n] = received[n] * std::conj(chirp_sample(mm, 0, n));
    Fft(mm).forward(out.bins);
    out.decision_ncoh = detect_noncoherent(out.bins);
    if (channel_phase) out.decision_coh = detect_coherent(out.bins, *channel_phase);
    return out;
}

double ser_to_ber(int m_order, double ser) {
    if (!(ser >= 0.0 && ser <= 1.0)) throw std::invalid_argument("ser_to_ber: ser must lie in [0, 1]");
    if (m_order < 2) throw std::invalid_argument("ser_to_ber: M must be at least 2");
    return (m_order / 2.0) / (m_order - 1.0) * ser;
}

double throughput(const LoRaParams &p, double ser) {
    if (!(ser >= 0.0 && ser <= 1.0)) throw std::invalid_argument("throughput: ser must lie in [0, 1]");
    return static_cast<double>(p.sf) / p.symbol_duration() * (1.0 - ser);
}

Modem::Modem(const LoRaParams &p) : p_(p), m_(p.m()), np_(p.prefix_length()), fft_(p.m()) {
    p_.validate();
    chirp_.resize(m_);
    chirp_conj_.resize(m_);
    tone_.resize(m_);
    xi_.resize(m_);
    for (int n = 0; n < m_; ++n) {
        chirp_[n] = chirp_sample(m_, 0, n);
        chirp_conj_[n] = std::conj(chirp_[n]);
        tone_[n] = unit_phase(n, m_);
        xi_[n] = xi(p_, n);
    }
    pilot_ = pilot_sequence(p_);
}

void Modem::transmit(int m, int u, std::span<cplx> out) const {
    if (static_cast<int>(out.size()) != m_) throw std::invalid_argument("Modem::transmit: output length must be M");
    if (m < 0 || m >= m_) throw std::out_of_range("Modem::transmit: symbol value out of range");
    if (np_ > 0 && (u < 1 || u > p_.u_split)) throw std::out_of_range("Modem::transmit: cycle index out of range");
    for (int n = 0; n < np_; ++n) out[n] = pilot_[n + (u - 1) * np_];
    std::int64_t idx = (static_cast<std::int64_t>(m) * np_) % m_;
    for (int n = np_; n < m_; ++n) {
        out[n] = chirp_[n] * tone_[idx];
        idx += m;
        if (idx >= m_) idx -= m_;
    }
}

void Modem::demodulate(std::span<const cplx> received, std::span<const cplx> noise_fill, std::span<cplx> bins) const {
    if (static_cast<int>(received.size()) != m_ || static_cast<int>(bins.size()) != m_ ||
        static_cast<int>(noise_fill.size()) != np_)
        throw std::invalid_argument("Modem::demodulate: length mismatch");
    for (int n = 0; n < np_; ++n) bins[n] = noise_fill[n];
    for (int n = np_; n < m_; ++n) bins[n] = received[n] * chirp_conj_[n];
    fft_.forward(bins);
}

} // namespace lorafas::phy

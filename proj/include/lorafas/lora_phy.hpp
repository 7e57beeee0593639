// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include "lorafas/fft.hpp"

#include <optional>
#include <span>
#include <vector>

namespace lorafas::phy {

/// LoRa link parameters. All waveform math is in normalized sample units;
/// bandwidth_hz only scales symbol duration and throughput.
struct LoRaParams {
    int sf = 8;       ///< spreading factor, M = 2^sf
    int sf_pilot = 6; ///< pilot spreading factor, P = 2^sf_pilot
    int u_split = 4;  ///< U, data symbols sharing one pilot
    double bandwidth_hz = 125e3;
    double noise_psd = 1.0; ///< N0
    double snr_db = -10.0;  ///< Gamma in dB
    /// Direct pilot fraction 1-D. Negative means derive it as P/(M U).
    /// Zero selects conventional LoRa without an embedded pilot.
    double pilot_fraction = -1.0;

    void validate() const;

    int m() const { return 1 << sf; }
    /// Pilot samples per symbol (the prefix length P/U).
    int prefix_length() const;
    /// Total pilot length over one cycle, U * prefix_length().
    int pilot_length() const;
    double data_fraction() const;
    bool full_symbol() const { return prefix_length() == 0; }
    double snr_linear() const;
    double symbol_energy() const;
    double symbol_duration() const;
};

struct SymbolWaveform {
    std::vector<cplx> samples;
    std::optional<int> payload; ///< empty for a pure pilot
    int cycle_index = 0;        ///< u in 1..U, 0 when no pilot is embedded
};

struct DemodOutput {
    std::vector<cplx> bins;
    int decision_ncoh = 0;
    std::optional<int> decision_coh;
};

SymbolWaveform basic_chirp(const LoRaParams &p);
SymbolWaveform modulate(const LoRaParams &p, int m);
/// The full pilot sequence x_p of length pilot_length().
std::vector<cplx> pilot_sequence(const LoRaParams &p);
/// Symbol m with the u-th pilot segment in its first prefix_length() samples.
SymbolWaveform embed_pilot(const LoRaParams &p, int m, int u);
/// Concatenates the pilot prefixes of U received symbols in cycle order.
std::vector<cplx> reconstruct_pilot(const LoRaParams &p, std::span<const std::vector<cplx>> symbols);

/// Leakage coefficient xi_d = (1/M) sum_{n=Np}^{M-1} exp(j 2 pi d n / M).
cplx xi(const LoRaParams &p, int d);
/// Same coefficient by direct summation, used as a cross-check.
cplx xi_direct(const LoRaParams &p, int d);

/// Dechirps the data region, inserts noise_fill over the pilot prefix
/// (in the dechirped domain) and returns all M DFT bins. When a channel
/// phase is given the coherent decision is filled in as well.
DemodOutput dechirp_dft(const LoRaParams &p, std::span<const cplx> received, std::span<const cplx> noise_fill,
                        std::optional<double> channel_phase = std::nullopt);

/// argmax |bins|, smallest index on ties.
int detect_noncoherent(std::span<const cplx> bins);
int detect_noncoherent(const DemodOutput &d);
/// argmax Re(bins * exp(-j phase)), smallest index on ties.
int detect_coherent(std::span<const cplx> bins, double channel_phase);
int detect_coherent(const DemodOutput &d, double channel_phase);

double ser_to_ber(int m_order, double ser);
double throughput(const LoRaParams &p, double ser);

/// Precomputed tables for repeated demodulation of one parameter set.
class Modem {
  public:
    explicit Modem(const LoRaParams &p);

    const LoRaParams &params() const { return p_; }
    int m() const { return m_; }
    int prefix() const { return np_; }
    /// Unit-energy symbol m carrying pilot segment u (u ignored in full-symbol mode).
    void transmit(int m, int u, std::span<cplx> out) const;
    /// Writes the M bins of the dechirped data region plus fill.
    void demodulate(std::span<const cplx> received, std::span<const cplx> noise_fill, std::span<cplx> bins) const;
    /// Dechirped bins of a noiseless unit symbol, without any sample-domain work:
    /// bin k of symbol m is xi_{m-k}.
    const std::vector<cplx> &xi_table() const { return xi_; }
    const std::vector<cplx> &pilot() const { return pilot_; }

  private:
    LoRaParams p_;
    int m_;
    int np_;
    Fft fft_;
    std::vector<cplx> chirp_conj_; ///< conj(x0[n])
    std::vector<cplx> tone_;       ///< exp(j 2 pi n / M)
    std::vector<cplx> chirp_;      ///< x0[n]
    std::vector<cplx> pilot_;
    std::vector<cplx> xi_; ///< xi_d for d = 0..M-1 (negative offsets wrap)
};

} // namespace lorafas::phy

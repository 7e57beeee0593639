// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/cli.hpp"

#include <stdexcept>

namespace lorafas::cli {

namespace {

const std::vector<double> kApertures{1.0, 2.0, 4.0};

std::string w_label(double w) { return "w" + format_number(w); }

mc::TrialConfig base_trial(int sf, int sf_pilot) {
    mc::TrialConfig t;
    t.lora.sf = sf;
    t.lora.sf_pilot = sf_pilot;
    t.lora.u_split = 4;
    t.lora.snr_db = -10.0;
    t.aperture.w_lambda = 1.0;
    t.aperture.num_ports = 50;
    return t;
}

Series make_series(std::string name, mc::TrialConfig t, mc::SweepAxis axis, std::vector<double> values) {
    Series s;
    s.name = std::move(name);
    s.trial = std::move(t);
    s.axis = axis;
    s.values = std::move(values);
    return s;
}

Experiment port_sweep() {
    // SF 7, 1 - D = 1/16 (P = 32, U = 4)
    Experiment e;
    e.preset = "fig3";
    const std::vector<double> ports{5, 10, 20, 30, 50, 75, 100};
    for (double w : kApertures) {
        auto t = base_trial(7, 5);
        t.aperture.w_lambda = w;
        e.series.push_back(make_series(w_label(w) + "_clarke", t, mc::SweepAxis::kNumPorts, ports));
        auto b = t;
        b.channel_kind = mc::ChannelKind::kBlockModel;
        b.block_mu_sq = 0.97;
        auto fixed = make_series(w_label(w) + "_block_mu0.97", b, mc::SweepAxis::kNumPorts, ports);
        fixed.analytic.mu_source = mc::MuSource::kFixed;
        fixed.analytic.fixed_mu_sq = 0.97;
        e.series.push_back(std::move(fixed));
    }
    return e;
}

Experiment snr_sweep(const std::string &name, mc::Detector det) {
    Experiment e;
    e.preset = name;
    for (double w : kApertures) {
        auto t = base_trial(8, 6);
        t.aperture.w_lambda = w;
        t.detector = det;
        e.series.push_back(make_series(w_label(w), t, mc::SweepAxis::kSnr, {-14, -12, -10, -8, -6}));
    }
    return e;
}

Experiment pilot_overhead_snr() {
    Experiment e;
    e.preset = "fig4c";
    for (int sfp : {6, 9}) {
        auto t = base_trial(8, sfp);
        t.aperture.w_lambda = 2.0;
        t.detector = mc::Detector::kBoth;
        e.series.push_back(make_series(sfp == 6 ? "w2_pf1/16" : "w2_pf1/2", t, mc::SweepAxis::kSnr,
                                       {-14, -12, -10, -8, -6}));
    }
    return e;
}

Experiment pilot_fraction_sweep(const std::string &name, mc::Detector det) {
    Experiment e;
    e.preset = name;
    for (double w : kApertures) {
        auto t = base_trial(8, 6);
        t.aperture.w_lambda = w;
        t.detector = det;
        e.series.push_back(make_series(w_label(w), t, mc::SweepAxis::kPilotFraction,
                                       {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 3.0 / 4}));
    }
    return e;
}

Experiment comparison_table() {
    Experiment e;
    e.preset = "table2";
    const std::vector<double> lengths{64, 128, 256};
    auto add = [&](std::string name, bool fas, mc::Detector det, mc::CsiKind csi, bool full_symbol) {
        auto t = base_trial(8, 6);
        t.detector = det;
        t.csi = csi;
        t.lora.snr_db = -6.0;
        if (!fas) t.aperture.num_ports = 1;
        if (full_symbol) t.lora.pilot_fraction = 0.0;
        auto s = make_series(std::move(name), t, full_symbol ? mc::SweepAxis::kSnr : mc::SweepAxis::kPilotLength,
                             full_symbol ? std::vector<double>{-6.0} : lengths);
        e.series.push_back(std::move(s));
    };
    add("lora_ncoh", false, mc::Detector::kNonCoherent, mc::CsiKind::kPerfect, true);
    add("lora_coh_perfect", false, mc::Detector::kCoherent, mc::CsiKind::kPerfect, false);
    add("lora_coh_ls", false, mc::Detector::kCoherent, mc::CsiKind::kLeastSquares, false);
    add("fas_ncoh_perfect", true, mc::Detector::kNonCoherent, mc::CsiKind::kPerfect, false);
    add("fas_ncoh_ls", true, mc::Detector::kNonCoherent, mc::CsiKind::kLeastSquares, false);
    add("fas_coh_perfect", true, mc::Detector::kCoherent, mc::CsiKind::kPerfect, false);
    add("fas_coh_ls", true, mc::Detector::kCoherent, mc::CsiKind::kLeastSquares, false);
    for (auto &s : e.series) s.analytic.enabled = s.trial.csi == mc::CsiKind::kPerfect;
    return e;
}

Experiment distribution(const std::string &name, std::vector<DistributionSeries> series) {
    Experiment e;
    e.preset = name;
    e.kind = ExperimentKind::kDistribution;
    e.distributions = std::move(series);
    return e;
}

DistributionSeries dist(std::string name, double w, int l, mc::ChannelKind kind, bool single) {
    DistributionSeries d;
    d.name = std::move(name);
    d.aperture = {w, l};
    d.kind = kind;
    d.single_block = single;
    return d;
}

} // namespace

const std::vector<std::string> &preset_names() {
    static const std::vector<std::string> names{"fig2a", "fig2b", "fig2c", "fig3",  "fig4a", "fig4b",
                                                "fig4c", "fig5a", "fig5b", "table2", "custom"};
    return names;
}

channel::BlockModel distribution_model(const DistributionSeries &d, double mu_sq) {
    if (d.single_block) {
        channel::BlockModel m;
        m.num_blocks = 1;
        m.block_sizes = {d.aperture.num_ports};
        m.mu_sq = mu_sq;
        m.validate();
        return m;
    }
    mc::AnalyticOptions opt;
    opt.mu_source = mc::MuSource::kFixed;
    opt.fixed_mu_sq = mu_sq;
    return mc::analytic_model(d.aperture, opt);
}

Experiment make_preset(const std::string &name) {
    using mc::ChannelKind;
    if (name == "fig2a") {
        std::vector<DistributionSeries> s;
        for (int l : {10, 50, 500})
            s.push_back(dist("block_L" + std::to_string(l), 1.0, l, ChannelKind::kBlockModel, true));
        return distribution(name, std::move(s));
    }
    if (name == "fig2b" || name == "fig2c") {
        const bool clarke = name == "fig2c";
        std::vector<DistributionSeries> s;
        for (double w : kApertures)
            s.push_back(dist(w_label(w) + "_L50", w, 50, clarke ? ChannelKind::kClarke : ChannelKind::kBlockModel,
                             false));
        return distribution(name, std::move(s));
    }
    if (name == "fig3") return port_sweep();
    if (name == "fig4a") return snr_sweep(name, mc::Detector::kNonCoherent);
    if (name == "fig4b") return snr_sweep(name, mc::Detector::kCoherent);
    if (name == "fig4c") return pilot_overhead_snr();
    if (name == "fig5a") return pilot_fraction_sweep(name, mc::Detector::kNonCoherent);
    if (name == "fig5b") return pilot_fraction_sweep(name, mc::Detector::kCoherent);
    if (name == "table2") return comparison_table();
    if (name == "custom") {
        Experiment e;
        e.preset = name;
        e.series.push_back(make_series("custom", base_trial(8, 6), mc::SweepAxis::kSnr, {-10.0}));
        return e;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

} // namespace lorafas::cli

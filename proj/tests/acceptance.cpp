// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/analytics.hpp"
#include "lorafas/cli.hpp"
#include "lorafas/montecarlo.hpp"
#include "lorafas/quadrature.hpp"
#include "lorafas/rng.hpp"
#include "lorafas/specfun.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace lorafas;

namespace {

// Pinned tolerances.
constexpr double kShiftDecimals = 1e-4;
constexpr double kCdfDeviation = 0.03;
constexpr double kPdfL1 = 0.05;
constexpr double kCurveSeconds = 60.0;
constexpr std::size_t kDraws = 100000;
constexpr double kFasNcohTarget = 6.6e-4;
constexpr double kFasCohTarget = 3.1e-4;
constexpr double kLoraNcohTarget = 8.9e-2;
constexpr double kFasFactor = 3.0;
constexpr double kLoraFactor = 1.5;
constexpr std::uint64_t kTableTrials = 1000000;
constexpr double kGainFactor = 10.0;
const double kHalfDecade = std::sqrt(10.0);
constexpr double kTightFactor = 2.0;
constexpr double kTightFloor = 1e-4;
constexpr std::uint64_t kResolvedErrors = 20;
constexpr double kGapTarget = 1e-4;
constexpr double kGapNominal = 1.0;
constexpr double kGapTolerance = 0.5;
constexpr double kWideningTarget = 1e-3;
constexpr double kXiTolerance = 1e-12;
constexpr double kLambertTolerance = 1e-12;
constexpr double kMarcumEnvelope = 0.06;
constexpr double kCondRel = 0.10;
constexpr double kPdfMass = 1e-3;
constexpr double kCorrTolerance = 0.02;

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
    void note(const std::string &s) { notes.push_back(s); }
    void require(bool ok, const std::string &s) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + s);
    }
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

mc::TrialConfig table_config() {
    mc::TrialConfig t;
    t.lora.sf = 8;
    t.lora.sf_pilot = 6;
    t.lora.u_split = 4;
    t.lora.snr_db = -6.0;
    t.aperture = {1.0, 50};
    t.num_trials = kTableTrials;
    t.min_errors = 0;
    t.workers = workers();
    return t;
}

mc::TrialConfig fig4_config(double w, int sf_pilot) {
    mc::TrialConfig t;
    t.lora.sf = 8;
    t.lora.sf_pilot = sf_pilot;
    t.lora.u_split = 4;
    t.aperture = {w, 50};
    t.num_trials = 1000000;
    t.min_errors = 400;
    t.workers = workers();
    return t;
}

// Shared runs at the -6 dB reference point (criteria 3 and 4).
struct TableRuns {
    mc::McResult fas_perfect, fas_ls, lora_ncoh, lora_coh_perfect, lora_coh_ls;
};

const TableRuns &table_runs() {
    static const TableRuns runs = [] {
        TableRuns r;
        auto fas = table_config();
        r.fas_perfect = mc::estimate_ser(fas);
        fas.csi = mc::CsiKind::kLeastSquares;
        r.fas_ls = mc::estimate_ser(fas);
        auto lora = table_config();
        lora.aperture.num_ports = 1;
        lora.lora.pilot_fraction = 0.0;
        lora.detector = mc::Detector::kNonCoherent;
        r.lora_ncoh = mc::estimate_ser(lora);
        auto lc = table_config();
        lc.aperture.num_ports = 1;
        lc.detector = mc::Detector::kCoherent;
        r.lora_coh_perfect = mc::estimate_ser(lc);
        lc.csi = mc::CsiKind::kLeastSquares;
        r.lora_coh_ls = mc::estimate_ser(lc);
        return r;
    }();
    return runs;
}

std::string est(const mc::SerEstimate &e) {
    return fmt(e.ser, 3) + " [" + fmt(e.ci_lo, 3) + ", " + fmt(e.ci_hi, 3) + "] (" + std::to_string(e.errors_seen) + "/" +
           std::to_string(e.trials_used) + ")";
}

bool within_factor(double v, double target, double factor) { return v >= target / factor && v <= target * factor; }

Outcome shift_constants() {
    Outcome o;
    const int sizes[3] = {10, 50, 500};
    const double want[3] = {0.1624, 0.2574, 0.3560};
    for (int i = 0; i < 3; ++i) {
        const double d = analytics::delta_b(0.97, sizes[i]);
        const double rounded = std::round(d / kShiftDecimals) * kShiftDecimals;
        o.require(std::abs(rounded - want[i]) < 1e-12,
                  "delta_b(0.97, " + std::to_string(sizes[i]) + ") = " + fmt(d, 8) + " -> " + fmt(rounded, 4));
    }
    return o;
}

Outcome distribution_fit() {
    Outcome o;
    for (int l : {10, 50, 500}) {
        // one equicorrelated block against its own sampled maximum
        const auto t0 = std::chrono::steady_clock::now();
        channel::BlockModel m;
        m.num_blocks = 1;
        m.block_sizes = {l};
        m.mu_sq = 0.97;
        const auto fit = mc::compare_distribution(
            mc::best_port_magnitudes({1.0, l}, mc::ChannelKind::kBlockModel, m, kDraws, 1), m);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(fit.max_cdf_dev <= kCdfDeviation && fit.pdf_l1 <= kPdfL1 && secs < kCurveSeconds,
                  "single block L_b=" + std::to_string(l) + ": max|dF| " + fmt(fit.max_cdf_dev, 3) + ", pdf L1 " +
                      fmt(fit.pdf_l1, 3) + ", " + fmt(secs, 2) + " s");
    }
    for (double w : {1.0, 2.0, 4.0}) {
        const auto t0 = std::chrono::steady_clock::now();
        const channel::ApertureSpec a{w, 50};
        mc::AnalyticOptions opt;
        opt.mu_source = mc::MuSource::kFixed;
        opt.fixed_mu_sq = 0.97;
        const auto model = mc::analytic_model(a, opt);
        const auto fit =
            mc::compare_distribution(mc::best_port_magnitudes(a, mc::ChannelKind::kClarke, model, kDraws, 1), model);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(fit.max_cdf_dev <= kCdfDeviation && fit.pdf_l1 <= kPdfL1 && secs < kCurveSeconds,
                  "W=" + fmt(w) + " L=50 B=" + std::to_string(model.num_blocks) + ": max|dF| " +
                      fmt(fit.max_cdf_dev, 3) + " (<= " + fmt(kCdfDeviation) + "), pdf L1 " + fmt(fit.pdf_l1, 3) +
                      " (<= " + fmt(kPdfL1) + "), " + fmt(secs, 2) + " s");
    }
    return o;
}

Outcome table_anchor() {
    Outcome o;
    const auto &r = table_runs();
    o.require(within_factor(r.fas_perfect.ncoh->ser, kFasNcohTarget, kFasFactor),
              "FAS non-coherent perfect " + est(*r.fas_perfect.ncoh) + " vs " + fmt(kFasNcohTarget) + " x" +
                  fmt(kFasFactor));
    o.require(within_factor(r.lora_ncoh.ncoh->ser, kLoraNcohTarget, kLoraFactor),
              "single-antenna non-coherent " + est(*r.lora_ncoh.ncoh) + " vs " + fmt(kLoraNcohTarget) + " x" +
                  fmt(kLoraFactor));
    o.require(within_factor(r.fas_perfect.coh->ser, kFasCohTarget, kFasFactor),
              "FAS coherent perfect " + est(*r.fas_perfect.coh) + " vs " + fmt(kFasCohTarget) + " x" +
                  fmt(kFasFactor));
    o.require(r.fas_ls.ncoh->ser >= r.fas_perfect.ncoh->ser,
              "FAS non-coherent LS " + est(*r.fas_ls.ncoh) + " >= perfect");
    o.require(r.fas_ls.coh->ser >= r.fas_perfect.coh->ser, "FAS coherent LS " + est(*r.fas_ls.coh) + " >= perfect");
    o.require(r.lora_coh_ls.coh->ser >= r.lora_coh_perfect.coh->ser,
              "single-antenna coherent LS " + est(*r.lora_coh_ls.coh) + " >= perfect " + est(*r.lora_coh_perfect.coh));
    return o;
}

Outcome fas_gain() {
    Outcome o;
    const auto &r = table_runs();
    const double ratio = r.lora_ncoh.ncoh->ser / r.fas_perfect.ncoh->ser;
    o.require(ratio >= kGainFactor, "non-coherent single antenna / FAS = " + fmt(ratio, 3) + " (>= " +
                                        fmt(kGainFactor) + ")");
    const double coh = r.lora_coh_perfect.coh->ser / r.fas_perfect.coh->ser;
    o.note("coherent single antenna / FAS = " + fmt(coh, 3));
    return o;
}

Outcome snr_agreement() {
    Outcome o;
    for (double w : {1.0, 2.0, 4.0}) {
        const auto tmpl = fig4_config(w, 6);
        const std::vector<double> snrs{-14, -12, -10, -8, -6};
        const auto pts = mc::sweep(tmpl, mc::SweepAxis::kSnr, snrs, {});
        for (const auto &pt : pts) {
            if (!pt.error.empty()) {
                o.require(false, "W=" + fmt(w) + " snr " + fmt(pt.axis_value) + ": " + pt.error);
                continue;
            }
            const bool exempt = w == 1.0 && pt.axis_value >= -8.0;
            for (int det = 0; det < 2; ++det) {
                const auto &e = det == 0 ? *pt.mc.ncoh : *pt.mc.coh;
                const double a = det == 0 ? *pt.analytic_ncoh : *pt.analytic_coh;
                std::string label = "W=" + fmt(w) + " " + fmt(pt.axis_value) + " dB " + (det == 0 ? "ncoh" : "coh ") +
                                    ": analytic " + fmt(a, 3) + " mc " + est(e);
                bool ok;
                if (e.errors_seen >= kResolvedErrors) {
                    const double ratio = a / e.ser;
                    const bool tight = w == 4.0 && e.ser >= kTightFloor;
                    const double f = tight ? kTightFactor : kHalfDecade;
                    ok = ratio >= 1.0 / f && ratio <= f;
                    label += " ratio " + fmt(ratio, 3) + (tight ? " (<= 2x)" : " (<= 10^0.5)");
                } else {
                    ok = a <= kHalfDecade * e.ci_hi;
                    label += " unresolved: analytic <= 10^0.5 * upper bound";
                }
                if (exempt && !ok) o.note("exempt (W=1, high SNR) " + label);
                else o.require(ok, label);
            }
        }
    }
    return o;
}

// SNR where the MC curve crosses `target`, by log-linear interpolation.
std::optional<double> crossing(const std::vector<mc::SweepPoint> &pts, bool coherent, double target) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto &a = coherent ? pts[i].mc.coh : pts[i].mc.ncoh;
        const auto &b = coherent ? pts[i + 1].mc.coh : pts[i + 1].mc.ncoh;
        if (!a || !b || a->errors_seen == 0 || b->errors_seen == 0) continue;
        if (a->ser >= target && b->ser <= target) {
            const double la = std::log10(a->ser), lb = std::log10(b->ser), lt = std::log10(target);
            const double t = la == lb ? 0.0 : (la - lt) / (la - lb);
            return pts[i].axis_value + t * (pts[i + 1].axis_value - pts[i].axis_value);
        }
    }
    return std::nullopt;
}

Outcome detector_gap() {
    Outcome o;
    auto gap = [&](double w, int sfp, std::vector<double> snrs, double target, const std::string &tag) -> std::optional<double> {
        auto cfg = fig4_config(w, sfp);
        const auto pts = mc::sweep(cfg, mc::SweepAxis::kSnr, snrs, {false});
        const auto n = crossing(pts, false, target);
        const auto c = crossing(pts, true, target);
        if (!n || !c) {
            o.require(false, tag + ": SER " + fmt(target) + " not bracketed by the SNR grid");
            return std::nullopt;
        }
        o.note(tag + ": non-coherent reaches " + fmt(target) + " at " + fmt(*n, 4) + " dB, coherent at " + fmt(*c, 4) +
               " dB");
        return *n - *c;
    };
    if (const auto g = gap(4.0, 6, {-13, -12, -11, -10, -9}, kGapTarget, "W=4, 1-D=1/16"))
        o.require(std::abs(*g - kGapNominal) <= kGapTolerance,
                  "gap " + fmt(*g, 3) + " dB within " + fmt(kGapNominal) + " +- " + fmt(kGapTolerance) + " dB");
    const auto narrow = gap(2.0, 6, {-13, -12, -11, -10, -9, -8}, kWideningTarget, "W=2, 1-D=1/16");
    const auto wide = gap(2.0, 9, {-8, -7, -6, -5, -4, -3, -2, -1, 0}, kWideningTarget, "W=2, 1-D=1/2");
    if (narrow && wide)
        o.require(*wide > *narrow, "coherent advantage at SER " + fmt(kWideningTarget) + ": " + fmt(*narrow, 3) +
                                       " dB (1/16) -> " + fmt(*wide, 3) + " dB (1/2)");
    return o;
}

Outcome pilot_monotonicity() {
    Outcome o;
    const std::vector<double> fractions{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 3.0 / 4};
    for (double w : {1.0, 2.0, 4.0}) {
        auto cfg = fig4_config(w, 6);
        cfg.lora.snr_db = -10.0;
        const auto pts = mc::sweep(cfg, mc::SweepAxis::kPilotFraction, fractions, {false});
        for (int det = 0; det < 2; ++det) {
            std::string line = "W=" + fmt(w) + (det == 0 ? " ncoh:" : " coh: ");
            bool ok = true;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const auto &e = det == 0 ? *pts[i].mc.ncoh : *pts[i].mc.coh;
                line += " " + fmt(e.ser, 3);
                if (i > 0) {
                    const auto &prev = det == 0 ? *pts[i - 1].mc.ncoh : *pts[i - 1].mc.coh;
                    if (e.ci_hi < prev.ci_lo) ok = false; // decrease beyond the 95% intervals
                }
            }
            o.require(ok, line);
        }
    }
    return o;
}

Outcome oracle_suites() {
    Outcome o;
    {
        double worst = 0.0;
        for (int sf : {7, 8}) {
            phy::LoRaParams p;
            p.sf = sf;
            p.sf_pilot = sf - 2;
            p.u_split = 4;
            for (int d = -(p.m() - 1); d < p.m(); ++d) worst = std::max(worst, std::abs(phy::xi(p, d) - phy::xi_direct(p, d)));
        }
        o.require(worst <= kXiTolerance, "(a) xi closed form vs sum, M in {128,256}: " + fmt(worst, 3));
    }
    {
        double worst = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double x = -std::exp(-1.0) + 1e-12 + 1e3 * std::pow(i / 2000.0, 4.0);
            const double w = specfun::lambert_w0(x);
            worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
        }
        o.require(worst <= kLambertTolerance, "(b) Lambert W residual: " + fmt(worst, 3));
    }
    {
        for (const auto &s : cli::run_validation())
            if (s.name.find("Marcum two-term") != std::string::npos)
                o.require(s.max_error <= kMarcumEnvelope,
                          "(c) Marcum approximation on z >= noise floor: " + fmt(s.max_error, 3) + " (envelope " +
                              fmt(kMarcumEnvelope) + ")");
    }
    {
        channel::BlockModel single;
        single.block_sizes = {50};
        for (double snr : {-14.0, -10.0, -6.0}) {
            phy::LoRaParams p;
            p.sf = 8;
            p.sf_pilot = 6;
            p.snr_db = snr;
            const auto ctx = analytics::make_context(p, single);
            for (double r : {0.5, 1.0, 2.0}) {
                const double exact = analytics::cond_ser_exact_quad(r, ctx).value;
                const double approx = analytics::cond_ser_ncoh(r, ctx);
                const double diff = std::abs(approx - exact);
                o.require(diff <= kCondRel * exact,
                          "(d) " + fmt(snr) + " dB r=" + fmt(r) + ": approx " + fmt(approx, 4) + " exact " +
                              fmt(exact, 4) + " rel " + fmt(exact > 0 ? diff / exact : 0.0, 3));
            }
        }
    }
    {
        double worst = 0.0;
        for (double w : {1.0, 2.0, 4.0}) {
            for (auto src : {mc::MuSource::kSelected, mc::MuSource::kFixed}) {
                mc::AnalyticOptions opt;
                opt.mu_source = src;
                const auto m = mc::analytic_model({w, 50}, opt);
                const auto q = quad::integrate_tail([&](double r) { return analytics::pdf_fas(r, m); }, 0.0, 0.5);
                worst = std::max(worst, std::abs(q.value - 1.0));
            }
        }
        o.require(worst <= kPdfMass, "(e) pdf_fas mass, W in {1,2,4}, L=50: max |1 - mass| " + fmt(worst, 3));
    }
    {
        channel::BlockModel m;
        m.num_blocks = 2;
        m.block_sizes = {4, 3};
        m.mu_sq = 0.97;
        const int n = 100000;
        std::complex<double> within = 0.0, across = 0.0;
        for (int i = 0; i < n; ++i) {
            rng::Stream s(77, i, rng::Tag::kChannel);
            const auto h = channel::sample_block_model(m, s);
            within += h.gains[1] * std::conj(h.gains[3]);
            across += h.gains[0] * std::conj(h.gains[5]);
        }
        const double wi = std::abs(within / double(n)), ac = std::abs(across / double(n));
        o.require(std::abs(wi - m.mu_sq) <= kCorrTolerance && ac <= kCorrTolerance,
                  "(f) within-block " + fmt(wi, 4) + " (mu^2 0.97), across-block " + fmt(ac, 3));
    }
    return o;
}

Outcome mu_selection() {
    Outcome o;
    double fixed_largest = 0.0, selected_largest = 0.0;
    for (int l : {20, 50, 100}) {
        const channel::ApertureSpec a{2.0, l};
        mc::AnalyticOptions fixed;
        fixed.mu_source = mc::MuSource::kFixed;
        fixed.fixed_mu_sq = 0.97;
        const auto mf = mc::analytic_model(a, fixed);
        const auto ms = mc::analytic_model(a, {});
        const auto samples = mc::best_port_magnitudes(a, mc::ChannelKind::kClarke, mf, kDraws, 5);
        const double df = mc::compare_distribution(samples, mf).max_cdf_dev;
        const double ds = mc::compare_distribution(samples, ms).max_cdf_dev;
        o.note("L=" + std::to_string(l) + ": fixed 0.97 -> " + fmt(df, 3) + ", selected " + fmt(ms.mu_sq, 5) + " -> " +
               fmt(ds, 3));
        fixed_largest = df;
        selected_largest = ds;
    }
    o.require(selected_largest < fixed_largest, "largest L: selected mu^2 reduces the deviation");
    return o;
}

Outcome determinism() {
    Outcome o;
    const std::vector<std::string> small{"num_trials=1500", "min_errors=0", "draws=1500"};
    for (const auto &name : cli::preset_names()) {
        auto exp = cli::make_preset(name);
        std::vector<cli::Setting> s;
        for (const auto &kv : small) {
            const auto st = cli::parse_assignment(kv, "acceptance", 0);
            if (exp.kind == cli::ExperimentKind::kDistribution ? st.key == "draws" : st.key != "draws") s.push_back(st);
        }
        cli::apply_settings(exp, s);
        cli::ExperimentSpec spec;
        spec.seed = 2024;
        const auto a = cli::execute(exp, spec);
        auto many = exp;
        for (auto &ser : many.series) ser.trial.workers = 4;
        const auto b = cli::execute(many, spec);
        const auto c = cli::execute(exp, spec);
        o.require(a.csv == b.csv && a.csv == c.csv,
                  name + ": " + std::to_string(a.csv.size()) + " bytes, repeat and 4-worker runs identical");
    }
    // the written artifacts as well
    const auto dir = std::filesystem::temp_directory_path() / "lorafas_acceptance";
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
        cli::ExperimentSpec spec;
        spec.preset = "fig4b";
        spec.output_dir = (dir / std::to_string(rep)).string();
        spec.seed = 9;
        spec.overrides = {cli::parse_assignment("num_trials=1000", "acceptance", 1),
                          cli::parse_assignment(rep == 0 ? "workers=1" : "workers=3", "acceptance", 2)};
        std::ostringstream sink;
        cli::run(spec, sink, sink);
        std::ifstream in(dir / std::to_string(rep) / "curve.csv", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        if (rep == 0) first = ss.str();
        else o.require(!first.empty() && first == ss.str(), "fig4b curve.csv files byte-identical across worker counts");
    }
    std::filesystem::remove_all(dir);
    return o;
}

} // namespace

int main(int argc, char **argv) {
    bool strict = false;
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) strict = true;
        else only.push_back(std::atoi(argv[i]));
    }
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"shift constants delta_b(0.97, {10,50,500})", shift_constants},
        {"best-port distribution vs exact-Clarke MC", distribution_fit},
        {"reference operating point and CSI ordering", table_anchor},
        {"FAS gain over a single fixed antenna", fas_gain},
        {"closed form vs MC over the SNR grid", snr_agreement},
        {"coherent vs non-coherent SNR gap", detector_gap},
        {"SER monotone in pilot fraction", pilot_monotonicity},
        {"oracle suites", oracle_suites},
        {"mu^2 selection rule", mu_selection},
        {"determinism across runs and workers", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception &e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "CRITERION " << id << " " << (out.pass ? "PASS" : "FAIL") << " " << criteria[i].first << " ("
                  << fmt(secs, 3) << " s)\n";
        for (const auto &n : out.notes) std::cout << "    " << n << '\n';
        std::cout.flush();
        if (!out.pass) ++failed;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion/criteria failed") << '\n';
    return strict && failed > 0 ? 1 : 0;
}

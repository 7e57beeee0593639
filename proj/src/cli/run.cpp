// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace lorafas::cli {

namespace {

using json = nlohmann::ordered_json;

const char *kVersion = "0.1.0";

const char *channel_name(mc::ChannelKind k) { return k == mc::ChannelKind::kClarke ? "clarke" : "block"; }
const char *csi_name(mc::CsiKind k) { return k == mc::CsiKind::kPerfect ? "perfect" : "ls"; }
const char *detector_name(mc::Detector d) {
    switch (d) {
    case mc::Detector::kNonCoherent: return "ncoh";
    case mc::Detector::kCoherent: return "coh";
    case mc::Detector::kBoth: return "both";
    }
    return "?";
}

json trial_json(const mc::TrialConfig &t) {
    return {{"sf", t.lora.sf},
            {"sf_pilot", t.lora.sf_pilot},
            {"u_split", t.lora.u_split},
            {"bandwidth_hz", t.lora.bandwidth_hz},
            {"noise_psd", t.lora.noise_psd},
            {"snr_db", t.lora.snr_db},
            {"pilot_fraction", t.lora.pilot_fraction},
            {"w_lambda", t.aperture.w_lambda},
            {"num_ports", t.aperture.num_ports},
            {"channel", channel_name(t.channel_kind)},
            {"csi", csi_name(t.csi)},
            {"detector", detector_name(t.detector)},
            {"num_trials", t.num_trials},
            {"max_rel_ci", t.max_rel_ci},
            {"min_errors", t.min_errors},
            {"block_mu_sq", t.block_mu_sq},
            {"workers", t.workers},
            {"batch_size", t.batch_size},
            {"seed", t.seed}};
}

json analytic_json(const mc::AnalyticOptions &a) {
    return {{"enabled", a.enabled},
            {"mu_source", a.mu_source == mc::MuSource::kSelected ? "selected" : "fixed"},
            {"fixed_mu_sq", a.fixed_mu_sq}};
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// One row per pilot length, one column per series; single-point series repeat on every row.
std::string pilot_length_table(const Experiment &exp, const json &points) {
    std::vector<double> lengths;
    for (const auto &s : exp.series)
        if (s.axis == mc::SweepAxis::kPilotLength)
            for (double v : s.values)
                if (std::find(lengths.begin(), lengths.end(), v) == lengths.end()) lengths.push_back(v);
    std::sort(lengths.begin(), lengths.end());
    auto lookup = [&](const Series &s, double p) -> std::string {
        for (const auto &pt : points) {
            if (pt["series"] != s.name) continue;
            if (s.axis == mc::SweepAxis::kPilotLength && pt["axis_value"].get<double>() != p) continue;
            for (const char *k : {"ncoh", "coh"})
                if (pt.contains(k)) return format_number(pt[k]["ser"].get<double>());
        }
        return {};
    };
    std::string out = "pilot_length";
    for (const auto &s : exp.series) out += "," + s.name;
    out += '\n';
    for (double p : lengths) {
        out += format_number(p);
        for (const auto &s : exp.series) out += "," + lookup(s, p);
        out += '\n';
    }
    return out;
}

void run_sweeps(const Experiment &exp, const ExperimentSpec &spec, std::ostream *log, RunOutput &out, json &rec) {
    out.csv_name = "curve.csv";
    out.csv = curve_csv_header();
    json series = json::array();
    json points = json::array();
    for (const auto &s : exp.series) {
        mc::TrialConfig tmpl = s.trial;
        tmpl.seed = spec.seed;
        series.push_back({{"name", s.name},
                          {"axis", mc::axis_name(s.axis)},
                          {"values", s.values},
                          {"trial", trial_json(tmpl)},
                          {"analytic", analytic_json(s.analytic)}});
        const bool both = tmpl.detector == mc::Detector::kBoth;
        for (double v : s.values) {
            const auto t0 = std::chrono::steady_clock::now();
            const std::array<double, 1> one{v};
            const mc::SweepPoint pt = mc::sweep(tmpl, s.axis, one, s.analytic).front();
            const double secs = elapsed(t0);
            json pj = {{"series", s.name}, {"axis_value", v}, {"seconds", secs}};
            if (!pt.error.empty()) {
                ++out.failed_points;
                pj["error"] = pt.error;
                CurveRow row;
                row.series = s.name;
                row.axis = mc::axis_name(s.axis);
                row.axis_value = v;
                out.csv += curve_csv_row(row);
                if (log) *log << "  " << s.name << " " << row.axis << "=" << format_number(v) << " FAILED: " << pt.error
                              << '\n';
                points.push_back(pj);
                continue;
            }
            auto emit = [&](const std::optional<mc::SerEstimate> &est, const std::optional<double> &analytic,
                            bool coherent, const char *suffix) {
                if (!est) return;
                CurveRow row;
                row.series = both ? s.name + suffix : s.name;
                row.axis = mc::axis_name(s.axis);
                row.axis_value = v;
                row.mc = est;
                (coherent ? row.analytic_coh : row.analytic_ncoh) = analytic;
                out.csv += curve_csv_row(row);
                pj[coherent ? "coh" : "ncoh"] = {{"ser", est->ser},
                                                 {"ber", est->ber},
                                                 {"ci_lo", est->ci_lo},
                                                 {"ci_hi", est->ci_hi},
                                                 {"trials", est->trials_used},
                                                 {"errors", est->errors_seen},
                                                 {"undersampled", est->undersampled}};
                if (analytic) pj[coherent ? "coh" : "ncoh"]["analytic"] = *analytic;
                if (log) {
                    *log << "  " << row.series << " " << row.axis << "=" << format_number(v)
                         << " ser=" << format_number(est->ser) << " (" << est->errors_seen << "/" << est->trials_used
                         << ")";
                    if (analytic) *log << " analytic=" << format_number(*analytic);
                    *log << '\n';
                }
            };
            emit(pt.mc.ncoh, pt.analytic_ncoh, false, "/ncoh");
            emit(pt.mc.coh, pt.analytic_coh, true, "/coh");
            points.push_back(pj);
        }
    }
    rec["series"] = series;
    rec["points"] = points;
    if (exp.preset == "table2") out.extra_files.emplace_back("table.csv", pilot_length_table(exp, rec["points"]));
}

void run_distributions(const Experiment &exp, const ExperimentSpec &spec, std::ostream *log, RunOutput &out,
                       json &rec) {
    out.csv_name = "cdf.csv";
    out.csv = distribution_csv_header();
    json series = json::array();
    const auto steps = static_cast<int>(std::floor(exp.r_max / exp.r_step + 1e-9));
    for (const auto &d : exp.distributions) {
        const auto t0 = std::chrono::steady_clock::now();
        json sj = {{"name", d.name},
                   {"w_lambda", d.aperture.w_lambda},
                   {"num_ports", d.aperture.num_ports},
                   {"channel", channel_name(d.kind)},
                   {"single_block", d.single_block},
                   {"mu_sq", exp.dist_mu_sq},
                   {"draws", exp.draws}};
        try {
            const auto model = distribution_model(d, exp.dist_mu_sq);
            auto samples = mc::best_port_magnitudes(d.aperture, d.kind, model, exp.draws, spec.seed);
            const auto fit = mc::compare_distribution(samples, model);
            std::sort(samples.begin(), samples.end());
            const double n = static_cast<double>(samples.size());
            const double h = exp.r_step;
            for (int k = 0; k <= steps; ++k) {
                DistributionRow row;
                row.series = d.name;
                row.r = k * h;
                row.cdf_analytic = analytics::cdf_fas(row.r, model);
                row.pdf_analytic = analytics::pdf_fas(row.r, model);
                const auto below = std::upper_bound(samples.begin(), samples.end(), row.r) - samples.begin();
                row.cdf_mc = below / n;
                const double lo = std::max(0.0, row.r - 0.5 * h);
                const double hi = row.r + 0.5 * h;
                const auto in_bin = std::lower_bound(samples.begin(), samples.end(), hi) -
                                    std::lower_bound(samples.begin(), samples.end(), lo);
                row.pdf_mc = in_bin / (n * (hi - lo));
                out.csv += distribution_csv_row(row);
            }
            sj["block_sizes"] = model.block_sizes;
            sj["max_cdf_dev"] = fit.max_cdf_dev;
            sj["pdf_l1"] = fit.pdf_l1;
            if (log)
                *log << "  " << d.name << " blocks=" << model.num_blocks << " max|dF|=" << format_number(fit.max_cdf_dev)
                     << '\n';
        } catch (const std::exception &e) {
            ++out.failed_points;
            sj["error"] = e.what();
            if (log) *log << "  " << d.name << " FAILED: " << e.what() << '\n';
        }
        sj["seconds"] = elapsed(t0);
        series.push_back(sj);
    }
    rec["series"] = series;
}

} // namespace

RunOutput execute(const Experiment &exp, const ExperimentSpec &spec, std::ostream *log) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    json rec;
    rec["tool"] = "lorafas";
    rec["version"] = kVersion;
    rec["name"] = spec.name.empty() ? exp.preset : spec.name;
    rec["preset"] = exp.preset;
    rec["seed"] = spec.seed;
    json ov = json::array();
    for (const auto &s : spec.overrides)
        ov.push_back({{"key", s.key}, {"value", s.value}, {"source", s.source}, {"line", s.line}});
    rec["overrides"] = ov;
    if (exp.kind == ExperimentKind::kSweep) run_sweeps(exp, spec, log, out, rec);
    else run_distributions(exp, spec, log, out, rec);
    rec["failed_points"] = out.failed_points;
    rec["total_seconds"] = elapsed(t0);
    out.record_json = rec.dump(2) + "\n";
    return out;
}

int run(const ExperimentSpec &spec, std::ostream &out, std::ostream &err) {
    Experiment exp;
    try {
        exp = make_preset(spec.preset);
        apply_settings(exp, spec.overrides);
    } catch (const std::exception &e) {
        err << "lorafas: " << e.what() << '\n';
        return 2;
    }
    std::string name = spec.name;
    for (const auto &s : spec.overrides)
        if (s.key == "name") name = s.value;
    if (name.empty()) name = exp.preset;
    const std::filesystem::path dir = spec.output_dir.empty() ? std::filesystem::path("runs") / name
                                                              : std::filesystem::path(spec.output_dir);
    ExperimentSpec resolved = spec;
    resolved.name = name;
    out << "lorafas: running " << exp.preset << " as '" << name << "' (seed " << spec.seed << ")\n";
    RunOutput res;
    try {
        res = execute(exp, resolved, &out);
        std::filesystem::create_directories(dir);
        std::ofstream(dir / res.csv_name, std::ios::binary) << res.csv;
        std::ofstream(dir / "run.json", std::ios::binary) << res.record_json;
        for (const auto &[file, text] : res.extra_files) std::ofstream(dir / file, std::ios::binary) << text;
    } catch (const std::exception &e) {
        err << "lorafas: " << e.what() << '\n';
        return 1;
    }
    out << "lorafas: wrote " << (dir / res.csv_name).string() << " and " << (dir / "run.json").string() << '\n';
    if (res.failed_points > 0) err << "lorafas: " << res.failed_points << " point(s) failed; see run.json\n";
    return 0;
}

} // namespace lorafas::cli

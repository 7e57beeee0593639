// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/cli.hpp"

#include <charconv>
#include <cmath>
#include <istream>

namespace lorafas::cli {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const Setting &s, const std::string &msg) {
    throw ConfigError(s.source, s.line, s.key + ": " + msg);
}

double to_double(const Setting &s, const std::string &text) {
    double v = 0.0;
    const char *first = text.data();
    const char *last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(s, "expected a number, got '" + text + "'");
    if (!std::isfinite(v)) fail(s, "value must be finite");
    return v;
}

double as_double(const Setting &s) { return to_double(s, s.value); }

std::int64_t as_int(const Setting &s) {
    std::int64_t v = 0;
    const char *first = s.value.data();
    const char *last = first + s.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(s, "expected an integer, got '" + s.value + "'");
    return v;
}

std::uint64_t as_count(const Setting &s) {
    const auto v = as_int(s);
    if (v < 0) fail(s, "must be non-negative");
    return static_cast<std::uint64_t>(v);
}

bool as_bool(const Setting &s) {
    if (s.value == "true" || s.value == "1" || s.value == "on") return true;
    if (s.value == "false" || s.value == "0" || s.value == "off") return false;
    fail(s, "expected true or false");
}

std::vector<double> as_list(const Setting &s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.value.size()) {
        auto next = s.value.find(',', pos);
        if (next == std::string::npos) next = s.value.size();
        const std::string item = trim(s.value.substr(pos, next - pos));
        if (item.empty()) fail(s, "empty list element");
        out.push_back(to_double(s, item));
        pos = next + 1;
    }
    if (out.empty()) fail(s, "empty list");
    return out;
}

/// Returns false when the key does not belong to the trial template.
bool apply_trial(mc::TrialConfig &t, const Setting &s) {
    const auto &k = s.key;
    if (k == "sf") t.lora.sf = static_cast<int>(as_int(s));
    else if (k == "sf_pilot") t.lora.sf_pilot = static_cast<int>(as_int(s));
    else if (k == "u_split") t.lora.u_split = static_cast<int>(as_int(s));
    else if (k == "bandwidth_hz") t.lora.bandwidth_hz = as_double(s);
    else if (k == "noise_psd") t.lora.noise_psd = as_double(s);
    else if (k == "snr_db") t.lora.snr_db = as_double(s);
    else if (k == "pilot_fraction") t.lora.pilot_fraction = as_double(s);
    else if (k == "w_lambda") t.aperture.w_lambda = as_double(s);
    else if (k == "num_ports") t.aperture.num_ports = static_cast<int>(as_int(s));
    else if (k == "channel") {
        if (s.value == "clarke") t.channel_kind = mc::ChannelKind::kClarke;
        else if (s.value == "block") t.channel_kind = mc::ChannelKind::kBlockModel;
        else fail(s, "expected clarke or block");
    } else if (k == "csi") {
        if (s.value == "perfect") t.csi = mc::CsiKind::kPerfect;
        else if (s.value == "ls") t.csi = mc::CsiKind::kLeastSquares;
        else fail(s, "expected perfect or ls");
    } else if (k == "detector") {
        if (s.value == "ncoh") t.detector = mc::Detector::kNonCoherent;
        else if (s.value == "coh") t.detector = mc::Detector::kCoherent;
        else if (s.value == "both") t.detector = mc::Detector::kBoth;
        else fail(s, "expected ncoh, coh or both");
    } else if (k == "num_trials") t.num_trials = as_count(s);
    else if (k == "max_rel_ci") t.max_rel_ci = as_double(s);
    else if (k == "min_errors") t.min_errors = as_count(s);
    else if (k == "block_mu_sq") t.block_mu_sq = as_double(s);
    else if (k == "workers") t.workers = static_cast<int>(as_int(s));
    else if (k == "batch_size") t.batch_size = as_count(s);
    else return false;
    return true;
}

bool apply_analytic(mc::AnalyticOptions &a, const Setting &s) {
    if (s.key == "analytic") a.enabled = as_bool(s);
    else if (s.key == "mu_source") {
        if (s.value == "selected") a.mu_source = mc::MuSource::kSelected;
        else if (s.value == "fixed") a.mu_source = mc::MuSource::kFixed;
        else fail(s, "expected selected or fixed");
    } else if (s.key == "fixed_mu_sq") {
        a.fixed_mu_sq = as_double(s);
        if (!(a.fixed_mu_sq > 0.0 && a.fixed_mu_sq < 1.0)) fail(s, "must lie in (0, 1)");
    } else return false;
    return true;
}

void apply_distribution(Experiment &exp, const Setting &s) {
    if (s.key == "draws") {
        exp.draws = as_count(s);
        if (exp.draws == 0) fail(s, "must be positive");
    } else if (s.key == "w_lambda") {
        const double w = as_double(s);
        if (!(w > 0.0)) fail(s, "must be positive");
        for (auto &d : exp.distributions) d.aperture.w_lambda = w;
    } else if (s.key == "num_ports") {
        const auto l = as_int(s);
        if (l < 1) fail(s, "must be positive");
        for (auto &d : exp.distributions) d.aperture.num_ports = static_cast<int>(l);
    } else if (s.key == "mu_sq" || s.key == "fixed_mu_sq") {
        exp.dist_mu_sq = as_double(s);
        if (!(exp.dist_mu_sq > 0.0 && exp.dist_mu_sq < 1.0)) fail(s, "must lie in (0, 1)");
    } else if (s.key == "channel") {
        mc::ChannelKind kind;
        if (s.value == "clarke") kind = mc::ChannelKind::kClarke;
        else if (s.value == "block") kind = mc::ChannelKind::kBlockModel;
        else fail(s, "expected clarke or block");
        for (auto &d : exp.distributions) d.kind = kind;
    } else if (s.key == "r_step") {
        exp.r_step = as_double(s);
        if (!(exp.r_step > 0.0)) fail(s, "must be positive");
    } else if (s.key == "r_max") {
        exp.r_max = as_double(s);
        if (!(exp.r_max > 0.0)) fail(s, "must be positive");
    } else {
        fail(s, "unknown key for a distribution preset");
    }
}

} // namespace

ConfigError::ConfigError(const std::string &source, int line, const std::string &msg)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + msg),
      source_(source), line_(line) {}

Setting parse_assignment(const std::string &text, const std::string &source, int line) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected key=value, got '" + trim(text) + "'");
    Setting s;
    s.key = trim(text.substr(0, eq));
    s.value = trim(text.substr(eq + 1));
    s.source = source;
    s.line = line;
    if (s.key.empty()) throw ConfigError(source, line, "missing key before '='");
    if (s.value.empty()) throw ConfigError(source, line, s.key + ": missing value");
    return s;
}

std::vector<Setting> parse_key_values(std::istream &in, const std::string &source) {
    std::vector<Setting> out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        out.push_back(parse_assignment(body, source, line));
    }
    return out;
}

void apply_settings(Experiment &exp, const std::vector<Setting> &settings) {
    for (const auto &s : settings) {
        if (s.key == "name") continue; // consumed by the runner
        if (exp.kind == ExperimentKind::kDistribution) {
            apply_distribution(exp, s);
            continue;
        }
        if (s.key == "axis") {
            const auto axis = mc::parse_axis(s.value);
            if (!axis) fail(s, "unknown axis '" + s.value + "'");
            for (auto &ser : exp.series) ser.axis = *axis;
        } else if (s.key == "values") {
            const auto vals = as_list(s);
            for (auto &ser : exp.series) ser.values = vals;
        } else {
            bool known = false;
            for (auto &ser : exp.series) {
                mc::AnalyticOptions &a = ser.analytic;
                known = apply_trial(ser.trial, s) || apply_analytic(a, s);
            }
            if (!known) fail(s, "unknown key");
        }
    }
    for (const auto &ser : exp.series) {
        try {
            ser.trial.validate();
            if (ser.values.empty()) throw std::invalid_argument("no sweep values");
        } catch (const std::invalid_argument &e) {
            throw ConfigError("series " + ser.name, 0, e.what());
        }
    }
}

} // namespace lorafas::cli

// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/cli.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace lorafas::cli {

namespace {

std::string quote(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string opt(const std::optional<double> &v) { return v ? format_number(*v) : std::string(); }

} // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string curve_csv_header() {
    return "series,axis,axis_value,mc_ser,ci_lo,ci_hi,analytic_ser_ncoh,analytic_ser_coh,trials,errors\n";
}

std::string curve_csv_row(const CurveRow &r) {
    std::string out = quote(r.series) + ',' + r.axis + ',' + format_number(r.axis_value) + ',';
    if (r.mc) {
        out += format_number(r.mc->ser) + ',' + format_number(r.mc->ci_lo) + ',' + format_number(r.mc->ci_hi) + ',';
    } else {
        out += ",,,";
    }
    out += opt(r.analytic_ncoh) + ',' + opt(r.analytic_coh) + ',';
    if (r.mc) out += std::to_string(r.mc->trials_used) + ',' + std::to_string(r.mc->errors_seen);
    else out += ',';
    return out + '\n';
}

std::string distribution_csv_header() { return "series,r,cdf_analytic,cdf_mc,pdf_analytic,pdf_mc\n"; }

std::string distribution_csv_row(const DistributionRow &r) {
    return quote(r.series) + ',' + format_number(r.r) + ',' + format_number(r.cdf_analytic) + ',' +
           format_number(r.cdf_mc) + ',' + format_number(r.pdf_analytic) + ',' + format_number(r.pdf_mc) + '\n';
}

} // namespace lorafas::cli

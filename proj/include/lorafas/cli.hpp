// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include "lorafas/analytics.hpp"
#include "lorafas/montecarlo.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lorafas::cli {

/// Configuration problem tied to a source (file name or "--set") and line.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string &source, int line, const std::string &msg);
    const std::string &source() const { return source_; }
    int line() const { return line_; }

  private:
    std::string source_;
    int line_;
};

struct Setting {
    std::string key;
    std::string value;
    std::string source = "--set";
    int line = 0;
};

/// Parses one "key=value" assignment. Blank keys and missing '=' are errors.
Setting parse_assignment(const std::string &text, const std::string &source, int line);
/// Flat key=value file; '#' starts a comment, blank lines are skipped.
std::vector<Setting> parse_key_values(std::istream &in, const std::string &source);

/// One Monte-Carlo curve: a trial template swept along one axis.
struct Series {
    std::string name;
    mc::TrialConfig trial;
    mc::SweepAxis axis = mc::SweepAxis::kSnr;
    std::vector<double> values;
    mc::AnalyticOptions analytic;
};

/// One best-port magnitude distribution compared with its closed form.
struct DistributionSeries {
    std::string name;
    channel::ApertureSpec aperture;
    mc::ChannelKind kind = mc::ChannelKind::kClarke;
    /// Single constant-correlation block of aperture.num_ports ports instead of a fit.
    bool single_block = false;
};

enum class ExperimentKind { kSweep, kDistribution };

struct Experiment {
    std::string preset;
    ExperimentKind kind = ExperimentKind::kSweep;
    std::vector<Series> series;
    std::vector<DistributionSeries> distributions;
    double dist_mu_sq = 0.97;
    std::size_t draws = 100000;
    double r_step = 0.05;
    double r_max = 3.0;
};

const std::vector<std::string> &preset_names();
/// Throws std::invalid_argument for an unknown name.
Experiment make_preset(const std::string &name);
/// Applies overrides in order; unknown keys or bad values raise ConfigError.
void apply_settings(Experiment &exp, const std::vector<Setting> &settings);

/// Block model used for a distribution series.
channel::BlockModel distribution_model(const DistributionSeries &d, double mu_sq);

/// Locale-independent shortest round-trip decimal form; "nan" / "inf" for non-finite.
std::string format_number(double v);

struct CurveRow {
    std::string series;
    std::string axis;
    double axis_value = 0.0;
    std::optional<mc::SerEstimate> mc;
    std::optional<double> analytic_ncoh;
    std::optional<double> analytic_coh;
};

std::string curve_csv_header();
std::string curve_csv_row(const CurveRow &row);

struct DistributionRow {
    std::string series;
    double r = 0.0;
    double cdf_analytic = 0.0;
    double cdf_mc = 0.0;
    double pdf_analytic = 0.0;
    double pdf_mc = 0.0;
};

std::string distribution_csv_header();
std::string distribution_csv_row(const DistributionRow &row);

struct ExperimentSpec {
    std::string name;
    std::string preset;
    std::vector<Setting> overrides;
    std::string output_dir;
    std::uint64_t seed = 1;
};

struct RunOutput {
    std::string csv_name; ///< curve.csv or cdf.csv
    std::string csv;
    std::string record_json;
    /// Additional derived tables (file name, content), e.g. the pilot-length grid of table2.
    std::vector<std::pair<std::string, std::string>> extra_files;
    int failed_points = 0;
};

/// Runs an experiment in memory; the CSV text depends only on the experiment and seed.
RunOutput execute(const Experiment &exp, const ExperimentSpec &spec, std::ostream *log = nullptr);
/// Resolves the preset, applies overrides, runs, and writes the artifacts. Returns the exit status.
int run(const ExperimentSpec &spec, std::ostream &out, std::ostream &err);

struct SuiteResult {
    std::string name;
    bool pass = false;
    double max_error = 0.0;
    double tolerance = 0.0;
};

std::vector<SuiteResult> run_validation(double tol_scale = 1.0,
                                        analytics::ThetaConvention theta = analytics::ThetaConvention::kDecaying);
int validate(double tol_scale, analytics::ThetaConvention theta, std::ostream &out);

} // namespace lorafas::cli

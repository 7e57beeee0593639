// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lorafas;

namespace {

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

cli::Experiment tiny(const std::string &preset, std::vector<std::string> extra = {}) {
    auto exp = cli::make_preset(preset);
    std::vector<cli::Setting> s;
    int line = 0;
    for (const auto &kv : extra) s.push_back(cli::parse_assignment(kv, "test", ++line));
    cli::apply_settings(exp, s);
    return exp;
}

} // namespace

TEST_CASE("key=value parsing reports lines") {
    std::istringstream in("# comment\n\nsf = 7\nnum_trials=100 # trailing\n");
    const auto s = cli::parse_key_values(in, "cfg.txt");
    REQUIRE(s.size() == 2);
    CHECK(s[0].key == "sf");
    CHECK(s[0].value == "7");
    CHECK(s[0].line == 3);
    CHECK(s[1].value == "100");

    std::istringstream bad("sf=7\nnonsense\n");
    try {
        cli::parse_key_values(bad, "cfg.txt");
        FAIL("expected an error");
    } catch (const cli::ConfigError &e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("cfg.txt:2") != std::string::npos);
    }
}

TEST_CASE("invalid settings are rejected with their position") {
    auto exp = cli::make_preset("custom");
    std::istringstream in("sf=8\nsnr_db=loud\n");
    const auto s = cli::parse_key_values(in, "x.cfg");
    try {
        cli::apply_settings(exp, s);
        FAIL("expected an error");
    } catch (const cli::ConfigError &e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(cli::apply_settings(exp, {cli::parse_assignment("colour=blue", "--set", 1)}), cli::ConfigError);
    CHECK_THROWS_AS(cli::apply_settings(exp, {cli::parse_assignment("sf=30", "--set", 1)}), cli::ConfigError);
    CHECK_THROWS_AS(cli::make_preset("fig9"), std::invalid_argument);
}

TEST_CASE("presets follow the figure captions") {
    const auto f3 = cli::make_preset("fig3");
    for (const auto &s : f3.series) {
        CHECK(s.trial.lora.sf == 7);
        CHECK(s.trial.lora.snr_db == -10.0);
        CHECK(s.trial.lora.data_fraction() == doctest::Approx(15.0 / 16.0));
        CHECK(s.axis == mc::SweepAxis::kNumPorts);
    }
    for (const char *name : {"fig4a", "fig4b"}) {
        const auto e = cli::make_preset(name);
        REQUIRE(e.series.size() == 3);
        for (const auto &s : e.series) {
            CHECK(s.trial.lora.sf == 8);
            CHECK(s.trial.aperture.num_ports == 50);
            CHECK(s.trial.lora.data_fraction() == doctest::Approx(15.0 / 16.0));
        }
    }
    const auto t2 = cli::make_preset("table2");
    int fas = 0;
    for (const auto &s : t2.series) {
        CHECK(s.trial.lora.snr_db == -6.0);
        if (s.trial.aperture.num_ports == 50) fas += 1;
    }
    CHECK(fas == 4);
    CHECK(cli::make_preset("fig2b").kind == cli::ExperimentKind::kDistribution);
    CHECK(cli::preset_names().size() == 11);
}

TEST_CASE("curve CSV golden rows") {
    cli::CurveRow r;
    r.series = "w1";
    r.axis = "snr";
    r.axis_value = -10;
    r.mc = mc::make_estimate(25, 1000, 256);
    r.analytic_ncoh = 0.0215;
    CHECK(cli::curve_csv_header() ==
          "series,axis,axis_value,mc_ser,ci_lo,ci_hi,analytic_ser_ncoh,analytic_ser_coh,trials,errors\n");
    CHECK(cli::curve_csv_row(r) ==
          "w1,snr,-10,0.025,0.016990131293434067,0.0366452892678433,0.0215,,1000,25\n");
    cli::CurveRow failed;
    failed.series = "a,b";
    failed.axis = "num_ports";
    failed.axis_value = 5;
    CHECK(cli::curve_csv_row(failed) == "\"a,b\",num_ports,5,,,,,,,\n");
    CHECK(cli::format_number(0.1) == "0.1");
    CHECK(cli::format_number(1e-7) == "1e-07");
    CHECK(cli::format_number(std::nan("")) == "nan");
}

TEST_CASE("re-running with the same seed gives identical CSV") {
    const auto exp = tiny("custom", {"num_trials=3000", "values=-10,-8", "min_errors=0"});
    cli::ExperimentSpec spec;
    spec.seed = 42;
    const auto a = cli::execute(exp, spec);
    auto exp2 = exp;
    for (auto &s : exp2.series) s.trial.workers = 3;
    const auto b = cli::execute(exp2, spec);
    CHECK(a.csv == b.csv);
    CHECK(a.failed_points == 0);
    spec.seed = 43;
    CHECK(cli::execute(exp, spec).csv != a.csv);
}

TEST_CASE("distribution preset writes a CDF grid") {
    const auto exp = tiny("fig2b", {"draws=2000", "r_step=0.5"});
    cli::ExperimentSpec spec;
    const auto out = cli::execute(exp, spec);
    CHECK(out.csv_name == "cdf.csv");
    std::istringstream in(out.csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "series,r,cdf_analytic,cdf_mc,pdf_analytic,pdf_mc");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3 * 7);
}

TEST_CASE("run writes artifacts and records failed points") {
    const auto dir = std::filesystem::temp_directory_path() / "lorafas_cli_test";
    std::filesystem::remove_all(dir);
    cli::ExperimentSpec spec;
    spec.preset = "custom";
    spec.output_dir = dir.string();
    spec.overrides = {cli::parse_assignment("num_trials=1000", "--set", 1),
                      cli::parse_assignment("axis=pilot_fraction", "--set", 2),
                      cli::parse_assignment("values=0.0625,1.5", "--set", 3)};
    std::ostringstream out, err;
    CHECK(cli::run(spec, out, err) == 0);
    const auto csv = slurp(dir / "curve.csv");
    CHECK(csv.find("custom/ncoh,pilot_fraction,0.0625,") != std::string::npos);
    CHECK(csv.find("custom,pilot_fraction,1.5,,,,,,,\n") != std::string::npos);
    const auto rec = slurp(dir / "run.json");
    CHECK(rec.find("\"failed_points\": 1") != std::string::npos);
    CHECK(rec.find("\"error\"") != std::string::npos);

    spec.preset = "nope";
    CHECK(cli::run(spec, out, err) != 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("validation suites pass and catch a flipped surrogate sign") {
    for (const auto &r : cli::run_validation()) CHECK_MESSAGE(r.pass, r.name);
    bool erfc_failed = false;
    for (const auto &r : cli::run_validation(1.0, analytics::ThetaConvention::kAsPrinted))
        if (r.name.find("erfc") != std::string::npos) erfc_failed = !r.pass;
    CHECK(erfc_failed);
    std::ostringstream os;
    CHECK(cli::validate(1e-6, analytics::ThetaConvention::kDecaying, os) == 1);
    CHECK(os.str().find("margin") != std::string::npos);
}

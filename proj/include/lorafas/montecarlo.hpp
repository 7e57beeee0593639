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
#include "lorafas/fas_channel.hpp"
#include "lorafas/lora_phy.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lorafas::mc {

enum class ChannelKind { kClarke, kBlockModel };
enum class CsiKind { kPerfect, kLeastSquares };
enum class Detector { kNonCoherent, kCoherent, kBoth };

struct TrialConfig {
    phy::LoRaParams lora;
    channel::ApertureSpec aperture;
    ChannelKind channel_kind = ChannelKind::kClarke;
    CsiKind csi = CsiKind::kPerfect;
    Detector detector = Detector::kBoth;
    std::uint64_t num_trials = 1000000;
    std::uint64_t seed = 1;
    /// Target relative half-width of the 95% interval; 0 selects the error-count rule.
    double max_rel_ci = 0.0;
    /// Stop once every active detector has seen this many errors (0 disables).
    std::uint64_t min_errors = 400;
    /// mu^2 for the block-model channel; negative selects it from the eigenvalues.
    double block_mu_sq = -1.0;
    int workers = 1;
    std::uint64_t batch_size = 4096;

    void validate() const;
    bool wants_ncoh() const { return detector != Detector::kCoherent; }
    bool wants_coh() const { return detector != Detector::kNonCoherent; }
};

struct TrialOutcome {
    int sent = 0;
    int decided_ncoh = -1; ///< -1 when the detector is not configured
    int decided_coh = -1;
};

/// Precomputed state for one configuration; run() is const and thread-safe.
class TrialRunner {
  public:
    explicit TrialRunner(const TrialConfig &cfg);

    struct Workspace {
        channel::ChannelRealization channel;
        std::vector<cplx> scratch;
        std::vector<cplx> rx;
        std::vector<cplx> fill;
        std::vector<cplx> bins;
        std::vector<cplx> pilot_rx;
    };

    TrialOutcome run(std::uint64_t trial_index, Workspace &ws) const;
    const TrialConfig &config() const { return cfg_; }
    const channel::BlockModel &block_model() const { return model_; }

  private:
    TrialConfig cfg_;
    phy::Modem modem_;
    channel::ClarkeCorrelation corr_;
    channel::BlockModel model_;
    std::vector<cplx> pilot_tx_; ///< sqrt(Es) x_p
    double amp_;
    double n0_;
};

TrialOutcome run_trial(const TrialConfig &cfg, std::uint64_t trial_index);

struct SerEstimate {
    double ser = 0.0;
    double ber = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    std::uint64_t trials_used = 0;
    std::uint64_t errors_seen = 0;
    bool undersampled = false; ///< no errors seen; ci_hi is the rule-of-three bound
};

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = 1.959963984540054);
SerEstimate make_estimate(std::uint64_t errors, std::uint64_t trials, int m_order);

/// Error counts of a batch of trials. Plain integers, so merging is exact.
struct Counts {
    std::uint64_t trials = 0;
    std::uint64_t errors_ncoh = 0;
    std::uint64_t errors_coh = 0;
    Counts &operator+=(const Counts &o) {
        trials += o.trials;
        errors_ncoh += o.errors_ncoh;
        errors_coh += o.errors_coh;
        return *this;
    }
};

/// Runs [0, total) in fixed batches, `workers` batches at a time, and checks
/// `stop` after each batch in index order. The result depends only on the
/// batch size, never on the worker count.
Counts run_batches(std::uint64_t total, std::uint64_t batch_size, int workers,
                   const std::function<Counts(std::uint64_t, std::uint64_t)> &batch,
                   const std::function<bool(const Counts &)> &stop);

struct McResult {
    std::optional<SerEstimate> ncoh;
    std::optional<SerEstimate> coh;
    double seconds = 0.0;
};

McResult estimate_ser(const TrialConfig &cfg);

enum class SweepAxis { kSnr, kNumPorts, kAperture, kPilotFraction, kPilotLength };
enum class MuSource { kSelected, kFixed };

struct AnalyticOptions {
    bool enabled = true;
    MuSource mu_source = MuSource::kSelected;
    double fixed_mu_sq = 0.97;
};

struct SweepPoint {
    double axis_value = 0.0;
    McResult mc;
    std::optional<double> analytic_ncoh;
    std::optional<double> analytic_coh;
    std::string error; ///< non-empty when this point failed
};

std::string axis_name(SweepAxis axis);
std::optional<SweepAxis> parse_axis(const std::string &name);
TrialConfig apply_axis(TrialConfig cfg, SweepAxis axis, double value);
/// Block model used by the closed forms for a given aperture.
channel::BlockModel analytic_model(const channel::ApertureSpec &aperture, const AnalyticOptions &opt);

/// |h| at the selected port for independent channel draws (trial index = draw).
std::vector<double> best_port_magnitudes(const channel::ApertureSpec &aperture, ChannelKind kind,
                                         const channel::BlockModel &block, std::size_t draws, std::uint64_t seed);

struct DistributionFit {
    double max_cdf_dev = 0.0; ///< sup |F_analytic - F_empirical| over the sample points
    double pdf_l1 = 0.0;      ///< L1 distance between pdf_fas and a histogram density
    std::size_t draws = 0;
};

DistributionFit compare_distribution(std::vector<double> samples, const channel::BlockModel &model,
                                     double bin_width = 0.05);

std::vector<SweepPoint> sweep(const TrialConfig &tmpl, SweepAxis axis, std::span<const double> values,
                              const AnalyticOptions &opt = {});

} // namespace lorafas::mc

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
#include "lorafas/rng.hpp"

#include <span>
#include <utility>
#include <vector>

namespace lorafas::channel {

struct ApertureSpec {
    double w_lambda = 1.0; ///< aperture length in wavelengths
    int num_ports = 50;    ///< L
    void validate() const;
};

struct SymmetricEigen {
    std::vector<double> values;  ///< descending
    std::vector<double> vectors; ///< column k (row-major n x n, element [i*n+k]) pairs with values[k]
    int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a real symmetric n x n matrix (row-major).
SymmetricEigen jacobi_eigen(std::span<const double> a, int n, int max_sweeps = 100);

struct ClarkeCorrelation {
    int size = 0;
    std::vector<double> matrix;      ///< row-major L x L
    std::vector<double> eigenvalues; ///< descending, clamped at 0
    std::vector<double> eigenvectors;
    std::vector<double> sqrt_factor; ///< V diag(sqrt(lambda)) V^T
    double clamped_mass = 0.0;       ///< total |negative eigenvalue| removed by clamping

    double at(int i, int j) const { return matrix[static_cast<std::size_t>(i) * size + j]; }
};

ClarkeCorrelation clarke_matrix(const ApertureSpec &spec);
/// Builds the decomposition for an arbitrary correlation matrix (row-major).
ClarkeCorrelation decompose_correlation(std::vector<double> matrix, int n);

struct MuSelection {
    double mu_sq = 0.0;
    bool degenerate = false; ///< no eigenvalue above the threshold
    int num_above = 0;
};

MuSelection select_mu_sq(const ClarkeCorrelation &corr, double rho_threshold = 1.0);
MuSelection select_mu_sq(std::span<const double> eigenvalues, double rho_threshold = 1.0);

struct BlockModel {
    int num_blocks = 1;
    std::vector<int> block_sizes{1};
    double mu_sq = 0.97;
    double rho_threshold = 1.0;

    void validate() const;
    int total_ports() const;
    /// Eigenvalues of the implied block-diagonal matrix, descending.
    std::vector<double> eigenvalues() const;
    /// Implied L x L correlation matrix, row-major.
    std::vector<double> implied_correlation() const;
};

BlockModel fit_blocks(const ClarkeCorrelation &corr, double mu_sq, double rho_threshold = 1.0);
/// Same rule on a descending eigenvalue list.
BlockModel fit_blocks(std::span<const double> eigenvalues, double mu_sq, double rho_threshold = 1.0);

struct ChannelRealization {
    std::vector<cplx> gains;
    int best_port = 0;
    cplx best_gain = 0.0;
};

/// Smallest index attaining the largest magnitude.
std::pair<int, cplx> best_port(std::span<const cplx> gains);

ChannelRealization sample_clarke(const ClarkeCorrelation &corr, rng::Stream &stream);
void sample_clarke(const ClarkeCorrelation &corr, rng::Stream &stream, ChannelRealization &out,
                   std::vector<cplx> &scratch);
ChannelRealization sample_block_model(const BlockModel &model, rng::Stream &stream);
void sample_block_model(const BlockModel &model, rng::Stream &stream, ChannelRealization &out);

enum class LsConvention {
    kConjugateReceived, ///< sum r* x / sum |x|^2, returns conj(h) for noiseless input
    kConjugatePilot,    ///< sum r x* / sum |x|^2, the usual estimator
};

/// Least-squares channel estimate from a reconstructed pilot.
cplx estimate_ls(std::span<const cplx> received_pilot, std::span<const cplx> pilot_tx,
                 LsConvention convention = LsConvention::kConjugateReceived);

} // namespace lorafas::channel

// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <functional>

namespace lorafas::quad {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct QuadOptions {
    double abs_tol = 1e-8;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration over [a, b].
QuadResult integrate(const std::function<double(double)> &f, double a, double b,
                     const QuadOptions &opt = {});

/// Integrate over [a, inf). The upper limit is found by stepping outward until
/// |f| drops below 1e-16 of the largest value seen; the integrand must be
/// unimodal-ish and decaying.
QuadResult integrate_tail(const std::function<double(double)> &f, double a, double step,
                          const QuadOptions &opt = {});

} // namespace lorafas::quad

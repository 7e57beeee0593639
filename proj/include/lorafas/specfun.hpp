// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

namespace lorafas::specfun {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kPi = 3.14159265358979323846;

/// Principal branch of the Lambert W function, w*exp(w) = x, w >= -1.
/// Throws std::domain_error for x < -1/e.
double lambert_w0(double x);

/// First-order Marcum Q function Q1(a, b).
double marcum_q1(double a, double b);

double erfc(double x);
/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double gauss_q(double x);
double norm_cdf(double x);
/// Inverse standard normal CDF. Throws std::domain_error unless 0 < p < 1.
double inv_norm_cdf(double p);

/// Modified Bessel function of the first kind, order zero.
double bessel_i0(double x);
/// Exponentially scaled I0: exp(-|x|) * I0(x).
double bessel_i0e(double x);

/// Unnormalized sinc, sin(x)/x.
double sinc(double x);

/// log of the binomial coefficient C(n, k).
double log_binomial(int n, int k);

} // namespace lorafas::specfun

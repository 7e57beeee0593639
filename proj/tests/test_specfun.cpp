// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/quadrature.hpp"
#include "lorafas/specfun.hpp"

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/lambert_w.hpp>
#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace lorafas;

namespace {

double boost_marcum(double a, double b) {
    boost::math::non_central_chi_squared d(2.0, a * a);
    return boost::math::cdf(boost::math::complement(d, b * b));
}

} // namespace

TEST_CASE("lambert_w0 fixed points and residual") {
    CHECK(specfun::lambert_w0(0.0) == 0.0);
    CHECK(specfun::lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(specfun::lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-6));
    // w e^w = 10.186 by bisection (1.75726; the quoted 1.7565 holds to 1e-3)
    double lo = 0.0, hi = 5.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::exp(mid) < 10.186 ? lo : hi) = mid;
    }
    CHECK(specfun::lambert_w0(10.186) == doctest::Approx(lo).epsilon(1e-13));
    CHECK(specfun::lambert_w0(10.186) == doctest::Approx(1.7565).epsilon(1e-3));
    for (double x : {-0.3, -0.1, 1e-8, 0.5, 3.0, 99.0, 1e6, 1e12}) {
        const double w = specfun::lambert_w0(x);
        CHECK(w * std::exp(w) == doctest::Approx(x).epsilon(1e-13));
        CHECK(w == doctest::Approx(boost::math::lambert_w0(x)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(specfun::lambert_w0(-0.5), std::domain_error);
}

TEST_CASE("marcum_q1 against the non-central chi-square tail") {
    CHECK(specfun::marcum_q1(0.0, 1.7) == doctest::Approx(std::exp(-0.5 * 1.7 * 1.7)).epsilon(1e-14));
    CHECK(specfun::marcum_q1(2.3, 0.0) == 1.0);
    // (1, 2) from quadrature of the defining integral
    const auto q = quad::integrate_tail(
        [](double x) { return x * std::exp(-0.5 * (x * x + 1.0)) * boost::math::cyl_bessel_i(0, x); }, 2.0, 1.0);
    CHECK(specfun::marcum_q1(1.0, 2.0) == doctest::Approx(q.value).epsilon(1e-10));
    for (double a : {0.1, 0.5, 1.0, 3.0, 7.5, 15.0, 30.0}) {
        for (double b : {0.2, 1.0, 2.5, 6.0, 12.0, 20.0, 31.0}) {
            const double ref = boost_marcum(a, b);
            const double got = specfun::marcum_q1(a, b);
            if (ref > 1e-250) CHECK(got == doctest::Approx(ref).epsilon(1e-9));
            else CHECK(got < 1e-200);
        }
    }
}

TEST_CASE("erfc, gauss_q and inv_norm_cdf") {
    CHECK(specfun::erfc(0.0) == 1.0);
    for (double x = -6.0; x <= 6.0; x += 0.25) CHECK(specfun::erfc(x) == doctest::Approx(std::erfc(x)).epsilon(1e-12));
    CHECK(specfun::gauss_q(0.0) == doctest::Approx(0.5));
    CHECK(specfun::gauss_q(1.0) + specfun::norm_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(specfun::inv_norm_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    for (double z = -5.0; z <= 5.0; z += 0.1) CHECK(specfun::inv_norm_cdf(specfun::norm_cdf(z)) == doctest::Approx(z).epsilon(1e-8));
    CHECK_THROWS(specfun::inv_norm_cdf(0.0));
    CHECK_THROWS(specfun::inv_norm_cdf(1.0));
}

TEST_CASE("bessel_i0 and scaled form") {
    for (double x : {0.0, 0.3, 1.0, 5.0, 20.0, 49.0, 50.0, 51.0, 200.0}) {
        CHECK(specfun::bessel_i0e(x) == doctest::Approx(boost::math::cyl_bessel_i(0, x) * std::exp(-x)).epsilon(1e-10));
        if (x <= 50.0) CHECK(specfun::bessel_i0(x) == doctest::Approx(boost::math::cyl_bessel_i(0, x)).epsilon(1e-10));
    }
}

TEST_CASE("sinc and log_binomial") {
    CHECK(specfun::sinc(0.0) == 1.0);
    CHECK(specfun::sinc(1e-6) == doctest::Approx(1.0 - 1e-12 / 6.0).epsilon(1e-15));
    CHECK(specfun::sinc(specfun::kPi) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(specfun::sinc(2.0) == doctest::Approx(std::sin(2.0) / 2.0).epsilon(1e-15));
    for (int n : {1, 5, 20, 60}) {
        for (int k = 0; k <= n; k += 3) {
            CHECK(std::exp(specfun::log_binomial(n, k)) ==
                  doctest::Approx(boost::math::binomial_coefficient<double>(n, k)).epsilon(1e-12));
        }
    }
    CHECK(specfun::log_binomial(5000, 2500) == doctest::Approx(std::lgamma(5001.0) - 2.0 * std::lgamma(2501.0)).epsilon(1e-12));
}

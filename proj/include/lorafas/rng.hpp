// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace lorafas::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al. counter-based generator).
Counter philox4x32_10(Counter ctr, Key key);

/// Draw tags separate independent uses inside one trial.
enum class Tag : std::uint32_t {
    kChannel = 1,
    kSymbol = 2,
    kNoise = 3,
    kNoiseFill = 4,
    kPilotNoise = 5,
    kStub = 6,
};

/// Deterministic stream keyed by (seed, trial, tag). Copyable, no shared state.
class Stream {
  public:
    Stream(std::uint64_t seed, std::uint64_t trial, std::uint32_t tag);
    Stream(std::uint64_t seed, std::uint64_t trial, Tag tag) : Stream(seed, trial, static_cast<std::uint32_t>(tag)) {}

    std::uint32_t next_u32();
    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform();
    /// Uniform integer in [0, n).
    std::uint32_t uniform_int(std::uint32_t n);
    double normal();
    /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0);

  private:
    void refill();

    Key key_;
    Counter ctr_;
    Counter buf_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace lorafas::rng

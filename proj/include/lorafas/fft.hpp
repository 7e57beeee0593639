// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace lorafas {

using cplx = std::complex<double>;

/// In-place radix-2 forward DFT, X[k] = sum_n x[n] exp(-j 2 pi k n / N).
class Fft {
  public:
    explicit Fft(int n);
    int size() const { return n_; }
    void forward(std::span<cplx> data) const;

  private:
    int n_;
    std::vector<int> rev_;
    std::vector<cplx> twiddle_;
};

/// O(N^2) reference DFT with the same sign convention.
std::vector<cplx> dft_direct(std::span<const cplx> x);

} // namespace lorafas

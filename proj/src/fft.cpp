// SPDX-License-Identifier: Apache-2.0
// lorafas: LoRa receivers over fluid antenna channels
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "lorafas/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace lorafas {

Fft::Fft(int n) : n_(n) {
    if (n < 1 || (n & (n - 1)) != 0) throw std::invalid_argument("Fft: size must be a power of two");
    int bits = 0;
    while ((1 << bits) < n) ++bits;
    rev_.resize(n);
    for (int i = 0; i < n; ++i) {
        int r = 0;
        for (int b = 0; b < bits; ++b)
            if (i & (1 << b)) r |= 1 << (bits - 1 - b);
        rev_[i] = r;
    }
    twiddle_.resize(n / 2 > 0 ? n / 2 : 1);
    for (int k = 0; k < n / 2; ++k) {
        const double ang = -2.0 * M_PI * k / n;
        twiddle_[k] = {std::cos(ang), std::sin(ang)};
    }
}

void Fft::forward(std::span<cplx> data) const {
    if (static_cast<int>(data.size()) != n_) throw std::invalid_argument("Fft::forward: length mismatch");
    for (int i = 0; i < n_; ++i)
        if (i < rev_[i]) std::swap(data[i], data[rev_[i]]);
    for (int len = 2; len <= n_; len <<= 1) {
        const int half = len / 2;
        const int stride = n_ / len;
        for (int start = 0; start < n_; start += len) {
            for (int j = 0; j < half; ++j) {
                const cplx t = twiddle_[j * stride] * data[start + j + half];
                data[start + j + half] = data[start + j] - t;
                data[start + j] += t;
            }
        }
    }
}

std::vector<cplx> dft_direct(std::span<const cplx> x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = (k * i) % n;
            const double ang = -2.0 * M_PI * static_cast<double>(idx) / static_cast<double>(n);
            acc += x[i] * cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

} // namespace lorafas

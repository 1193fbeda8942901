#pragma once

// Radix-2 FFT over the multiprecision Complex type. Sizes here are a few
// thousand; twiddles are built from exact rational phases once per size.

#include <vector>

#include "srflow/bigmath.hpp"

namespace srflow {

inline bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

inline void fft_in_place(std::vector<Complex>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_in_place: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        // w = e^{+-2 pi i / len}
        Complex wl = cis_turn(Rational(inverse ? 1 : -1, static_cast<long>(len)));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(Real(1), Real(0));
            for (std::size_t k = 0; k < len / 2; ++k) {
                Complex u = a[i + k];
                Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w = w * wl;
            }
        }
    }
    if (inverse) {
        Real inv = Real(1) / Real(static_cast<long>(n));
        for (auto& z : a) z = z * inv;
    }
}

// Fourier coefficients of a real 1-periodic function from N equispaced
// samples: c_k = (1/N) sum_i f(i/N) e^{-2 pi i k i / N}, for k = 0..N/2.
// (c_{-k} = conj(c_k) for real input.)
inline std::vector<Complex> fourier_coefficients(const std::vector<Real>& samples) {
    const std::size_t n = samples.size();
    std::vector<Complex> work(n);
    for (std::size_t i = 0; i < n; ++i) work[i] = Complex(samples[i]);
    fft_in_place(work);
    std::vector<Complex> out(n / 2 + 1);
    Real inv = Real(1) / Real(static_cast<long>(n));
    for (std::size_t k = 0; k <= n / 2; ++k) out[k] = work[k] * inv;
    return out;
}

}  // namespace srflow

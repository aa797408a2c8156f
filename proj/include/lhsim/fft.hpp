#ifndef LHSIM_FFT_HPP
#define LHSIM_FFT_HPP

// Self-contained complex FFT: iterative radix-2 for power-of-two lengths,
// Bluestein's chirp-z algorithm for arbitrary lengths. Deterministic output
// for a given input regardless of threading elsewhere.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lhsim {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place radix-2 Cooley-Tukey. Forward transform uses e^{-2*pi*i*jk/n};
/// inverse includes the 1/n normalization.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft_pow2: length not a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (cplx& x : a) x /= static_cast<double>(n);
}

/// FFT of arbitrary length. Power-of-two lengths go straight to radix-2;
/// others use Bluestein's algorithm (chirp-z via a power-of-two convolution).
inline std::vector<cplx> fft(std::vector<cplx> a, bool inverse = false) {
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("fft: empty input");
    if (n == 1) return a;
    if (is_power_of_two(n)) {
        fft_pow2(a, inverse);
        return a;
    }
    const double pi = 3.14159265358979323846;
    const double sign = inverse ? 1.0 : -1.0;
    // chirp: w[k] = e^{sign * i * pi * k^2 / n}; use k^2 mod 2n to keep the
    // argument small for long inputs
    std::vector<cplx> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t k2 = (k * k) % (2 * n);
        double ang = sign * pi * static_cast<double>(k2) / static_cast<double>(n);
        w[k] = cplx(std::cos(ang), std::sin(ang));
    }
    const std::size_t m = next_power_of_two(2 * n - 1);
    std::vector<cplx> fa(m, cplx(0.0, 0.0)), fb(m, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * w[k];
    fb[0] = std::conj(w[0]);
    for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(w[k]);
    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
    fft_pow2(fa, true);
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = fa[k] * w[k];
    if (inverse)
        for (cplx& x : out) x /= static_cast<double>(n);
    return out;
}

}  // namespace lhsim

#endif

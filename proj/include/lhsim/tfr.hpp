#ifndef LHSIM_TFR_HPP
#define LHSIM_TFR_HPP

// Smoothed pseudo Wigner-Ville distribution and its instantaneous power,
// frequency and amplitude series. The input is made analytic first so the
// distribution lives on the non-negative frequency half-axis without
// negative-frequency cross-terms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fft.hpp"
#include "preprocess.hpp"
#include "series.hpp"

namespace lhsim {

inline double gap_marker() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_gap(double v) { return std::isnan(v); }

// ---------------------------------------------------------------------------
// Analytic signal
// ---------------------------------------------------------------------------

/// Discrete Hilbert-transform analytic signal: spectrum zeroed on negative
/// frequencies, doubled on positive, DC (and Nyquist for even length)
/// preserved. Real part equals the input.
inline ComplexSeries analytic_signal(const UniformSeries& x) {
    const std::size_t n = x.size();
    if (n < 8) throw std::invalid_argument("analytic_signal: need >= 8 samples");
    std::vector<cplx> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = cplx(x.values[i], 0.0);
    buf = fft(std::move(buf), false);
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) buf[k] *= 2.0;
    if (n % 2 == 0) {
        // buf[half] (Nyquist) kept as is
        for (std::size_t k = half + 1; k < n; ++k) buf[k] = cplx(0.0, 0.0);
    } else {
        for (std::size_t k = half + 1; k < n; ++k) buf[k] = cplx(0.0, 0.0);
    }
    buf = fft(std::move(buf), true);
    ComplexSeries z;
    z.t0 = x.t0;
    z.dt = x.dt;
    z.values = std::move(buf);
    return z;
}

// ---------------------------------------------------------------------------
// SPWVD
// ---------------------------------------------------------------------------

enum class WindowShape { Hamming, Gaussian, Rectangular };

/// Smoothing configuration: h (length h_len) weights the lag axis and is
/// normalized to h(0)=1 at the center; g (length g_len) averages in time and
/// sums to 1. h_len = g_len = 1 gives the plain pseudo-free WVD.
struct SpwvdConfig {
    // a short lag window keeps the zero-padded edge margin small, so yearly
    // phases near the ends of a record stay inside the valid interior; the
    // amplitude marginal does not depend on the lag window at all
    std::size_t h_len = 31;
    // the time window spans a quarter year on the daily grid: short
    // sampling-artifact transients are averaged out of the amplitude series
    // while the circannual structure passes
    std::size_t g_len = 155;
    std::size_t n_freq_bins = 512;
    WindowShape window_shape = WindowShape::Hamming;

    void check() const {
        if (h_len % 2 == 0 || g_len % 2 == 0)
            throw std::invalid_argument("SpwvdConfig: window lengths must be odd");
        if (!is_power_of_two(n_freq_bins))
            throw std::invalid_argument("SpwvdConfig: n_freq_bins must be a power of two");
        if (n_freq_bins < h_len)
            throw std::invalid_argument("SpwvdConfig: n_freq_bins must be >= h_len");
    }

    /// Samples on each side of a time column influenced by the edges.
    std::size_t interior_margin() const { return (h_len + g_len) / 2; }
};

namespace detail {

inline std::vector<double> window_taps(WindowShape shape, std::size_t len) {
    std::vector<double> w(len, 1.0);
    if (len == 1 || shape == WindowShape::Rectangular) return w;
    const double c = 0.5 * static_cast<double>(len - 1);
    for (std::size_t n = 0; n < len; ++n) {
        double u = (static_cast<double>(n) - c) / c;  // [-1, 1]
        if (shape == WindowShape::Hamming)
            w[n] = 0.54 + 0.46 * std::cos(kPi * u);
        else
            w[n] = std::exp(-0.5 * (2.5 * u) * (2.5 * u));
    }
    return w;
}

}  // namespace detail

/// Discrete SPWVD values over a (time x frequency) grid. freqs are in
/// cycles/hour covering [0, Nyquist]; values are row-major time x frequency.
struct TimeFrequencyMap {
    double t0 = 0.0;
    double dt = 1.0;  // hours
    std::vector<double> freqs;
    std::size_t n_times = 0;
    std::vector<double> values;  // n_times * freqs.size()

    double at(std::size_t t, std::size_t f) const { return values[t * freqs.size() + f]; }
    double freq_step() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

/// SPW(n,k) = sum_m g(m) sum_tau h^2(tau) z(n+m+tau) conj(z(n+m-tau))
/// e^{-i 4 pi k tau / N}, signal zero-padded outside its support. The lag
/// sum is evaluated with one length-N FFT per time column; columns are
/// independent, so the work is split across n_threads with identical output
/// for any thread count.
inline TimeFrequencyMap spwvd(const ComplexSeries& z, const SpwvdConfig& cfg,
                              unsigned n_threads = 1) {
    cfg.check();
    const std::size_t len = z.size();
    if (len < cfg.h_len + cfg.g_len)
        throw std::invalid_argument("spwvd: series shorter than combined window support");

    const std::size_t nfb = cfg.n_freq_bins;
    const long th = static_cast<long>((cfg.h_len - 1) / 2);
    const long tg = static_cast<long>((cfg.g_len - 1) / 2);
    auto h = detail::window_taps(cfg.window_shape, cfg.h_len);
    auto g = detail::window_taps(cfg.window_shape, cfg.g_len);
    {
        double gsum = 0.0;
        for (double v : g) gsum += v;
        for (double& v : g) v /= gsum;
        double hc = h[static_cast<std::size_t>(th)];
        for (double& v : h) v /= hc;
    }
    std::vector<double> h2(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) h2[i] = h[i] * h[i];

    TimeFrequencyMap map;
    map.t0 = z.t0;
    map.dt = z.dt;
    const std::size_t n_freqs = nfb / 2 + 1;
    map.freqs.resize(n_freqs);
    for (std::size_t k = 0; k < n_freqs; ++k)
        map.freqs[k] = static_cast<double>(k) / (static_cast<double>(nfb) * z.dt);
    map.n_times = len;
    map.values.assign(len * n_freqs, 0.0);

    const long n_long = static_cast<long>(len);
    auto zv = [&](long i) -> cplx {
        return (i < 0 || i >= n_long) ? cplx(0.0, 0.0) : z.values[static_cast<std::size_t>(i)];
    };

    std::vector<double> max_imag(std::max(1u, n_threads), 0.0);
    std::vector<double> max_real(std::max(1u, n_threads), 0.0);

    auto worker = [&](std::size_t begin, std::size_t end, unsigned tid) {
        std::vector<cplx> buf(nfb);
        for (std::size_t n = begin; n < end; ++n) {
            std::fill(buf.begin(), buf.end(), cplx(0.0, 0.0));
            for (long tau = 0; tau <= th; ++tau) {
                cplx acc(0.0, 0.0);
                for (long m = -tg; m <= tg; ++m) {
                    double gw = g[static_cast<std::size_t>(m + tg)];
                    acc += gw * zv(static_cast<long>(n) + m + tau) *
                           std::conj(zv(static_cast<long>(n) + m - tau));
                }
                acc *= h2[static_cast<std::size_t>(tau + th)];
                std::size_t idx = (2 * static_cast<std::size_t>(tau)) % nfb;
                buf[idx] += acc;
                if (tau > 0) {
                    std::size_t idx2 = (nfb - 2 * static_cast<std::size_t>(tau) % nfb) % nfb;
                    buf[idx2] += std::conj(acc);
                }
            }
            fft_pow2(buf, false);
            for (std::size_t k = 0; k < n_freqs; ++k) {
                map.values[n * n_freqs + k] = buf[k].real();
                max_imag[tid] = std::max(max_imag[tid], std::abs(buf[k].imag()));
                max_real[tid] = std::max(max_real[tid], std::abs(buf[k].real()));
            }
        }
    };

    if (n_threads <= 1) {
        worker(0, len, 0);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (len + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t) {
            std::size_t b = std::min(len, static_cast<std::size_t>(t) * chunk);
            std::size_t e = std::min(len, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e, t);
        }
        for (auto& th_ : pool) th_.join();
    }

    double mi = 0.0, mr = 0.0;
    for (double v : max_imag) mi = std::max(mi, v);
    for (double v : max_real) mr = std::max(mr, v);
    if (mr > 0.0 && mi > 1e-10 * mr)
        throw std::runtime_error("spwvd: imaginary residue exceeds 1e-10 relative");
    return map;
}

// ---------------------------------------------------------------------------
// Moments and amplitude
// ---------------------------------------------------------------------------

struct InstantSeries {
    UniformSeries ipow;
    UniformSeries ifreq;  // gap markers where power vanishes
    UniformSeries iamp;
};

/// Zeroth and first frequency moments per time column. Columns with power
/// below 1e-12 of the maximum get a gap marker for ifreq.
inline InstantSeries instantaneous_moments(const TimeFrequencyMap& m) {
    const std::size_t nt = m.n_times;
    const std::size_t nf = m.freqs.size();
    const double dnu = m.freq_step();
    std::vector<double> ipow(nt, 0.0), ifreq(nt, gap_marker());
    for (std::size_t t = 0; t < nt; ++t) {
        double p = 0.0;
        for (std::size_t k = 0; k < nf; ++k) p += m.at(t, k);
        ipow[t] = p * dnu;
    }
    double pmax = 0.0;
    for (double p : ipow) pmax = std::max(pmax, std::abs(p));
    for (std::size_t t = 0; t < nt; ++t) {
        if (std::abs(ipow[t]) <= 1e-12 * pmax || pmax == 0.0) continue;
        double pf = 0.0;
        for (std::size_t k = 0; k < nf; ++k) pf += m.at(t, k) * m.freqs[k];
        ifreq[t] = pf * dnu / ipow[t];
    }
    InstantSeries out;
    out.ipow = UniformSeries(m.t0, m.dt, std::move(ipow));
    out.ifreq = UniformSeries(m.t0, m.dt, std::move(ifreq));
    out.iamp = out.ipow;  // placeholder until calibrated
    return out;
}

/// Pointwise alpha * sqrt(ipow). Tiny negative power (numerical residue) is
/// clipped to zero; anything below -1e-12 of the maximum is an upstream bug.
inline UniformSeries instantaneous_amplitude(const UniformSeries& ipow, double alpha_cal) {
    double pmax = 0.0;
    for (double p : ipow.values) pmax = std::max(pmax, std::abs(p));
    std::vector<double> amp(ipow.size());
    for (std::size_t i = 0; i < ipow.size(); ++i) {
        double p = ipow.values[i];
        if (p < 0.0) {
            if (p < -1e-12 * pmax)
                throw std::invalid_argument("instantaneous_amplitude: negative power input");
            p = 0.0;
        }
        amp[i] = alpha_cal * std::sqrt(p);
    }
    return UniformSeries(ipow.t0, ipow.dt, std::move(amp));
}

/// Closed-loop amplitude calibration: push a unit tone at the band's
/// geometric-center frequency through band extraction, analytic signal,
/// SPWVD and the power moment, and return 1/sqrt(median interior power) so
/// a unit tone maps to unit amplitude.
inline double calibrate_amplitude(const SpwvdConfig& cfg, const BandSpec& band, double dt,
                                  std::size_t num_taps = 255) {
    cfg.check();
    const double f = band.center_frequency();  // cycles/hour
    std::size_t margin = cfg.interior_margin() + (num_taps - 1) / 2;
    std::size_t len = std::max<std::size_t>(4 * margin,
        static_cast<std::size_t>(std::ceil(6.0 / (f * dt))));  // >= 6 periods
    std::vector<double> tone(len);
    for (std::size_t i = 0; i < len; ++i)
        tone[i] = std::sin(2.0 * kPi * f * dt * static_cast<double>(i));
    UniformSeries x(0.0, dt, std::move(tone));
    UniformSeries b = extract_band(x, band, num_taps);
    auto z = analytic_signal(b);
    auto map = spwvd(z, cfg);
    auto mom = instantaneous_moments(map);
    std::vector<double> interior(mom.ipow.values.begin() + static_cast<long>(margin),
                                 mom.ipow.values.end() - static_cast<long>(margin));
    if (interior.empty()) throw std::runtime_error("calibrate_amplitude: no interior samples");
    std::nth_element(interior.begin(), interior.begin() + interior.size() / 2, interior.end());
    double med = interior[interior.size() / 2];
    if (!(med > 0.0)) throw std::runtime_error("calibrate_amplitude: non-positive median power");
    return 1.0 / std::sqrt(med);
}

}  // namespace lhsim

#endif

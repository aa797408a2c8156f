#ifndef LHSIM_PREPROCESS_HPP
#define LHSIM_PREPROCESS_HPP

// Irregular-to-daily resampling (natural cubic spline) and LF/HF band
// extraction with zero-phase windowed-sinc FIR filters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "series.hpp"

namespace lhsim {

// ---------------------------------------------------------------------------
// Natural cubic spline
// ---------------------------------------------------------------------------

/// Natural cubic spline through (x_i, y_i); second derivatives vanish at the
/// ends. Standard tridiagonal solve for the knot second derivatives.
class CubicSpline {
  public:
    CubicSpline(const std::vector<double>& x, const std::vector<double>& y) : x_(x), y_(y) {
        const std::size_t n = x.size();
        if (n < 4) throw std::invalid_argument("CubicSpline: need >= 4 points");
        if (y.size() != n) throw std::invalid_argument("CubicSpline: length mismatch");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x[i] > x[i - 1]))
                throw std::invalid_argument("CubicSpline: abscissae not strictly increasing");

        m_.assign(n, 0.0);
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
        diag[0] = diag[n - 1] = 1.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double h0 = x[i] - x[i - 1];
            double h1 = x[i + 1] - x[i];
            sub[i] = h0;
            diag[i] = 2.0 * (h0 + h1);
            sup[i] = h1;
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        // Thomas algorithm
        for (std::size_t i = 1; i < n; ++i) {
            double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[n - 1] = rhs[n - 1] / diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
    }

    double eval(double t) const {
        const std::size_t n = x_.size();
        if (t < x_.front() || t > x_.back())
            throw std::out_of_range("CubicSpline::eval: outside knot span");
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
        if (i == 0) i = 1;
        if (i >= n) i = n - 1;
        --i;
        double h = x_[i + 1] - x_[i];
        double a = (x_[i + 1] - t) / h;
        double b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

  private:
    std::vector<double> x_, y_, m_;
};

/// Resample an irregular series on a uniform grid spanning its support.
inline UniformSeries resample_spline(const IrregularSeries& raw, double dt = 24.0) {
    raw.validate();
    if (raw.size() < 4) throw std::invalid_argument("resample_spline: need >= 4 points");
    if (!(dt > 0.0)) throw std::invalid_argument("resample_spline: dt must be > 0");
    CubicSpline spline(raw.times, raw.values);
    const double t0 = raw.times.front();
    const double t_last = raw.times.back();
    const std::size_t n = static_cast<std::size_t>(std::floor((t_last - t0) / dt + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = spline.eval(std::min(t0 + dt * static_cast<double>(i), t_last));
    return UniformSeries(t0, dt, std::move(v));
}

// ---------------------------------------------------------------------------
// FIR design and zero-phase filtering
// ---------------------------------------------------------------------------

enum class BandKind { LowPass, BandPass };

/// Band boundaries given as periods (hours). LowPass keeps periods longer
/// than cutoff_period; BandPass keeps periods in [short_period, long_period].
struct BandSpec {
    BandKind kind = BandKind::LowPass;
    double cutoff_period = 152.0 * kHoursPerDay;  // LowPass
    double short_period = 10.5 * kHoursPerDay;    // BandPass
    double long_period = 21.0 * kHoursPerDay;     // BandPass

    static BandSpec low_pass(double cutoff_period_hours) {
        if (!(cutoff_period_hours > 0.0)) throw std::invalid_argument("BandSpec: bad cutoff");
        BandSpec s;
        s.kind = BandKind::LowPass;
        s.cutoff_period = cutoff_period_hours;
        return s;
    }
    static BandSpec band_pass(double short_period_hours, double long_period_hours) {
        if (!(short_period_hours > 0.0 && short_period_hours < long_period_hours))
            throw std::invalid_argument("BandSpec: need 0 < short < long period");
        BandSpec s;
        s.kind = BandKind::BandPass;
        s.short_period = short_period_hours;
        s.long_period = long_period_hours;
        return s;
    }

    /// Geometric-center frequency (cycles/hour) used for amplitude calibration.
    double center_frequency() const {
        if (kind == BandKind::BandPass)
            return 1.0 / std::sqrt(short_period * long_period);
        return 0.5 / cutoff_period;  // one octave below the cutoff
    }
};

/// Symmetric linear-phase taps; group delay (len-1)/2 samples.
struct FilterKernel {
    std::vector<double> taps;
    std::size_t nominal_delay() const { return (taps.size() - 1) / 2; }

    /// Magnitude of the frequency response at normalized frequency f
    /// (cycles/sample) by direct discrete-time Fourier sum.
    double gain_at(double f) const {
        const double c = static_cast<double>(nominal_delay());
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n < taps.size(); ++n) {
            double ang = -2.0 * kPi * f * (static_cast<double>(n) - c);
            re += taps[n] * std::cos(ang);
            im += taps[n] * std::sin(ang);
        }
        return std::sqrt(re * re + im * im);
    }
};

namespace detail {

inline double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

/// Hamming-windowed sinc lowpass, cutoff fc in cycles/sample, DC gain 1.
inline std::vector<double> lowpass_taps(double fc, std::size_t num_taps) {
    std::vector<double> h(num_taps);
    const double c = 0.5 * static_cast<double>(num_taps - 1);
    double sum = 0.0;
    for (std::size_t n = 0; n < num_taps; ++n) {
        double m = static_cast<double>(n) - c;
        double w = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) /
                                          static_cast<double>(num_taps - 1));
        h[n] = 2.0 * fc * sinc(2.0 * fc * m) * w;
        sum += h[n];
    }
    for (double& v : h) v /= sum;
    return h;
}

}  // namespace detail

/// Windowed-sinc linear-phase design. Band boundaries are passband edges:
/// the -6 dB design cutoff sits half a Hamming transition width
/// (~1.65/num_taps normalized) outside each stated edge, so the response is
/// ~1 at the edge itself. BandPass is the difference of two unity-DC lowpass
/// kernels, so its DC gain is exactly 0.
inline FilterKernel design_fir(const BandSpec& spec, double dt, std::size_t num_taps) {
    if (num_taps < 31 || num_taps % 2 == 0)
        throw std::invalid_argument("design_fir: num_taps must be odd and >= 31");
    const double half_transition = 1.65 / static_cast<double>(num_taps);  // cycles/sample
    FilterKernel k;
    if (spec.kind == BandKind::LowPass) {
        double fc = dt / spec.cutoff_period + half_transition;
        if (fc >= 0.5) throw std::invalid_argument("design_fir: cutoff at/above Nyquist");
        k.taps = detail::lowpass_taps(fc, num_taps);
    } else {
        double f_lo = dt / spec.long_period - half_transition;
        double f_hi = dt / spec.short_period + half_transition;
        if (f_lo <= 0.0)
            throw std::invalid_argument("design_fir: band too wide for this tap count");
        if (f_hi >= 0.5) throw std::invalid_argument("design_fir: band edge at/above Nyquist");
        auto hi = detail::lowpass_taps(f_hi, num_taps);
        auto lo = detail::lowpass_taps(f_lo, num_taps);
        k.taps.resize(num_taps);
        for (std::size_t n = 0; n < num_taps; ++n) k.taps[n] = hi[n] - lo[n];
    }
    return k;
}

/// Zero-phase filtering: centered convolution with the symmetric kernel,
/// reflection padding at the edges, output on the input timestamps.
inline UniformSeries filter_zero_phase(const UniformSeries& x, const FilterKernel& k) {
    const std::size_t len = x.size();
    const std::size_t m = k.taps.size();
    if (len <= m) throw std::invalid_argument("filter_zero_phase: series shorter than kernel");
    const long c = static_cast<long>(k.nominal_delay());
    const long n = static_cast<long>(len);
    auto reflect = [n](long i) {
        while (i < 0 || i >= n) {
            if (i < 0) i = -i;
            if (i >= n) i = 2 * n - 2 - i;
        }
        return static_cast<std::size_t>(i);
    };
    std::vector<double> y(len, 0.0);
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long j = 0; j < static_cast<long>(m); ++j)
            acc += k.taps[static_cast<std::size_t>(j)] * x.values[reflect(i + j - c)];
        y[static_cast<std::size_t>(i)] = acc;
    }
    return UniformSeries(x.t0, x.dt, std::move(y));
}

inline UniformSeries extract_band(const UniformSeries& x, const BandSpec& spec,
                                  std::size_t num_taps = 255) {
    return filter_zero_phase(x, design_fir(spec, x.dt, num_taps));
}

}  // namespace lhsim

#endif

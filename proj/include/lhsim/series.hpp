#ifndef LHSIM_SERIES_HPP
#define LHSIM_SERIES_HPP

// Time series containers shared across the simulation and analysis chain.
// All internal times are in hours; conversion to days happens only at the
// reporting boundary (exact factor 1/24).

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lhsim {

constexpr double kHoursPerDay = 24.0;
constexpr double kPi = 3.14159265358979323846;

/// Fixed-step samples with a start time and step (hours).
struct UniformSeries {
    double t0 = 0.0;                // hours
    double dt = 1.0;                // hours, > 0
    std::vector<double> values;

    UniformSeries() = default;
    UniformSeries(double t0_, double dt_, std::vector<double> v)
        : t0(t0_), dt(dt_), values(std::move(v)) {
        if (dt <= 0.0) throw std::invalid_argument("UniformSeries: dt must be > 0");
        if (values.empty()) throw std::invalid_argument("UniformSeries: empty");
    }

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double end_time() const { return time_at(values.size() - 1); }

    /// Linear interpolation between adjacent grid points.
    double interp(double t) const {
        double x = (t - t0) / dt;
        if (x < 0.0 || x > static_cast<double>(values.size() - 1))
            throw std::out_of_range("UniformSeries::interp: t outside support");
        std::size_t i = static_cast<std::size_t>(x);
        if (i >= values.size() - 1) return values.back();
        double frac = x - static_cast<double>(i);
        return values[i] + frac * (values[i + 1] - values[i]);
    }
};

/// Complex-valued fixed-step samples (analytic signals).
struct ComplexSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<std::complex<double>> values;

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

/// Timestamped samples at non-uniform times (hours, strictly increasing).
struct IrregularSeries {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const { return times.size(); }

    void validate() const {
        if (times.size() != values.size())
            throw std::invalid_argument("IrregularSeries: times/values length mismatch");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw std::invalid_argument(
                    "IrregularSeries: times not strictly increasing at index " +
                    std::to_string(i));
        for (double v : values)
            if (!std::isfinite(v))
                throw std::invalid_argument("IrregularSeries: non-finite value");
    }
};

}  // namespace lhsim

#endif

#ifndef LHSIM_MODEL_HPP
#define LHSIM_MODEL_HPP

// Synthetic plasmatic LH generator: pulsatile pituitary secretion with a
// photoperiod-controlled interspike interval, first-order blood clearance,
// and jittered twice-weekly sampling of the fine-grid solution.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "series.hpp"

namespace lhsim {


enum class PspikeKind { Constant, Sinusoid, DampedSinusoid };

/// Interspike-interval control law P_spike(t). The sinusoid oscillates
/// between p_min and p_max with period p_photo; the damped variant keeps the
/// sinusoid for the first period and then decays with damping ratio zeta,
/// with the continuity constant K matching the two branches at t = p_photo.
struct PspikeProfile {
    PspikeKind kind = PspikeKind::Sinusoid;
    double p_const = 36.0;   // hours, Constant only
    double p_min = 1.5;      // hours
    double p_max = 36.0;     // hours
    double p_photo = 8760.0; // hours
    double zeta = 0.0;       // damping ratio in [0,1)

    static PspikeProfile constant(double p) {
        if (p <= 0.0) throw std::invalid_argument("PspikeProfile: p_const must be > 0");
        PspikeProfile prof;
        prof.kind = PspikeKind::Constant;
        prof.p_const = p;
        return prof;
    }

    static PspikeProfile sinusoid(double p_min, double p_max, double p_photo) {
        PspikeProfile prof;
        prof.kind = PspikeKind::Sinusoid;
        prof.p_min = p_min;
        prof.p_max = p_max;
        prof.p_photo = p_photo;
        prof.check();
        return prof;
    }

    static PspikeProfile damped_sinusoid(double p_min, double p_max, double p_photo,
                                         double zeta) {
        PspikeProfile prof;
        prof.kind = PspikeKind::DampedSinusoid;
        prof.p_min = p_min;
        prof.p_max = p_max;
        prof.p_photo = p_photo;
        prof.zeta = zeta;
        prof.check();
        return prof;
    }

    void check() const {
        if (kind == PspikeKind::Constant) {
            if (p_const <= 0.0) throw std::invalid_argument("PspikeProfile: p_const must be > 0");
            return;
        }
        if (!(p_min > 0.0 && p_min <= p_max))
            throw std::invalid_argument("PspikeProfile: need 0 < p_min <= p_max");
        if (!(p_photo > 0.0)) throw std::invalid_argument("PspikeProfile: p_photo must be > 0");
        if (!(zeta >= 0.0 && zeta < 1.0))
            throw std::invalid_argument("PspikeProfile: zeta must be in [0,1)");
    }

    double delta_p() const { return p_max - p_min; }
    double omega() const { return 2.0 * kPi / p_photo; }

    /// Continuity constant for the damped branch at t = p_photo.
    double continuity_k() const {
        double wd = std::sqrt(1.0 - zeta * zeta);
        return 1.0 / (std::sin(2.0 * wd * kPi) + 1.0);
    }

    double eval(double t) const {
        switch (kind) {
            case PspikeKind::Constant:
                return p_const;
            case PspikeKind::Sinusoid:
                return 0.5 * delta_p() * (std::sin(omega() * t) + 1.0) + p_min;
            case PspikeKind::DampedSinusoid: {
                if (t < p_photo)
                    return 0.5 * delta_p() * (std::sin(omega() * t) + 1.0) + p_min;
                double wd = std::sqrt(1.0 - zeta * zeta);
                double osc = std::sin(wd * omega() * t) + 1.0;
                double env = continuity_k() * std::exp(-zeta * omega() * (t - p_photo));
                return 0.5 * delta_p() * osc * env + p_min;
            }
        }
        return p_const;  // unreachable
    }
};

/// Spike amplitude, decay stiffness and blood clearance rate.
struct SecretionParams {
    double a_spike = 150.0;     // ng
    double k_hl = 2.0;          // 1/hours
    double alpha_clear = 6.0;   // 1/hours

    void check() const {
        if (!(a_spike > 0.0 && k_hl > 0.0 && alpha_clear > 0.0))
            throw std::invalid_argument("SecretionParams: all rates must be > 0");
    }

    double spike_half_life() const { return std::log(2.0) / k_hl; }          // hours
    double clearance_half_life() const { return std::log(2.0) / alpha_clear; }
};

/// Pointwise instantaneous pituitary release: an impulse of amplitude
/// a_spike every P_spike(t) hours followed by exponential decay, evaluated
/// with the time-varying interval inside the floor.
inline double eval_secretion(const SecretionParams& params, const PspikeProfile& profile,
                             double t) {
    double p = profile.eval(t);
    double since_spike = t - std::floor(t / p) * p;
    return params.a_spike * std::exp(-params.k_hl * since_spike);
}

/// Integrate dLH_p/dt = LH(t) - alpha*LH_p with explicit midpoint (RK2) on
/// the fine grid {0, fine_dt, ...}. y0 is a test hook; the model uses 0.
inline UniformSeries integrate_plasma(const SecretionParams& params,
                                      const PspikeProfile& profile, double horizon,
                                      double fine_dt, double y0 = 0.0) {
    params.check();
    profile.check();
    if (!(horizon > 0.0)) throw std::invalid_argument("integrate_plasma: horizon must be > 0");
    if (!(fine_dt > 0.0 && fine_dt <= 0.05))
        throw std::invalid_argument("integrate_plasma: fine_dt must be in (0, 0.05]");
    if (params.alpha_clear * fine_dt >= 1.0)
        throw std::invalid_argument("integrate_plasma: alpha*fine_dt >= 1 (unstable)");

    const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / fine_dt)) + 1;
    std::vector<double> y(n);
    y[0] = y0;
    const double a = params.alpha_clear;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double t = fine_dt * static_cast<double>(i);
        double k1 = eval_secretion(params, profile, t) - a * y[i];
        double ymid = y[i] + 0.5 * fine_dt * k1;
        double k2 = eval_secretion(params, profile, t + 0.5 * fine_dt) - a * ymid;
        y[i + 1] = y[i] + fine_dt * k2;
    }
    return UniformSeries(0.0, fine_dt, std::move(y));
}

/// Variant with externally supplied forcing (closed-form oracles in tests).
template <typename Forcing>
inline UniformSeries integrate_plasma_forced(Forcing&& forcing, double alpha, double horizon,
                                             double fine_dt, double y0 = 0.0) {
    if (!(horizon > 0.0 && fine_dt > 0.0 && fine_dt <= 0.05))
        throw std::invalid_argument("integrate_plasma_forced: bad horizon/fine_dt");
    if (alpha * fine_dt >= 1.0)
        throw std::invalid_argument("integrate_plasma_forced: alpha*fine_dt >= 1");
    const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / fine_dt)) + 1;
    std::vector<double> y(n);
    y[0] = y0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double t = fine_dt * static_cast<double>(i);
        double k1 = forcing(t) - alpha * y[i];
        double ymid = y[i] + 0.5 * fine_dt * k1;
        double k2 = forcing(t + 0.5 * fine_dt) - alpha * ymid;
        y[i + 1] = y[i] + fine_dt * k2;
    }
    return UniformSeries(0.0, fine_dt, std::move(y));
}

/// Twice-weekly sampling with bounded uniform jitter from a seeded
/// MT19937-64 stream.
struct SamplingSchedule {
    double base_interval = 84.0;     // hours
    double jitter_halfwidth = 0.5;   // hours
    std::uint64_t seed = 1;
    double start_offset = 0.0;       // hours

    void check() const {
        if (!(base_interval > 2.0 * jitter_halfwidth))
            throw std::invalid_argument(
                "SamplingSchedule: base_interval must exceed 2*jitter_halfwidth");
        if (jitter_halfwidth < 0.0)
            throw std::invalid_argument("SamplingSchedule: negative jitter_halfwidth");
    }
};

/// Uniform double in [0,1) from the raw 64-bit stream. std::uniform_real_
/// distribution is implementation-defined; this mapping is bit-exact.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);  // 2^-53
}

/// Sample times t_i = start_offset + base_interval*i + a(i), a(i) uniform on
/// [-jitter_halfwidth, jitter_halfwidth). n_samples = 0 takes as many samples
/// as the fine support allows; an explicit count past the support throws.
inline IrregularSeries sample_series(const UniformSeries& fine, const SamplingSchedule& sched,
                                     std::size_t n_samples = 0) {
    sched.check();
    const double t_end = fine.end_time();
    if (sched.start_offset < fine.t0 - 1e-12)
        throw std::invalid_argument("sample_series: start_offset before fine support");
    if (n_samples == 0) {
        double span = t_end - sched.start_offset - sched.jitter_halfwidth;
        if (span < 0.0) throw std::invalid_argument("sample_series: no room for samples");
        n_samples = static_cast<std::size_t>(std::floor(span / sched.base_interval)) + 1;
    }
    std::mt19937_64 rng(sched.seed);
    IrregularSeries out;
    out.times.reserve(n_samples);
    out.values.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        double jitter = (2.0 * uniform01(rng) - 1.0) * sched.jitter_halfwidth;
        double t = sched.start_offset + sched.base_interval * static_cast<double>(i) + jitter;
        if (t > t_end)
            throw std::out_of_range("sample_series: sample time beyond fine support");
        out.times.push_back(t);
        out.values.push_back(fine.interp(t));
    }
    out.validate();
    return out;
}

}  // namespace lhsim

#endif

#include <doctest.h>

#include <cmath>
#include <vector>

#include "lhsim/tfr.hpp"
#include "oracles.hpp"

using namespace lhsim;
using oracles::naive_spwvd_point;

namespace {

ComplexSeries analytic_tone(std::size_t n, double f_cycles_per_sample, double dt,
                            double amplitude = 1.0) {
    ComplexSeries z;
    z.t0 = 0.0;
    z.dt = dt;
    z.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ang = 2.0 * kPi * f_cycles_per_sample * static_cast<double>(i);
        z.values[i] = amplitude * cplx(std::cos(ang), std::sin(ang));
    }
    return z;
}

}  // namespace

TEST_CASE("analytic_signal of a cosine is the complex exponential") {
    const std::size_t n = 512;
    const double f = 20.0 / static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2.0 * kPi * f * static_cast<double>(i));
    auto z = analytic_signal(UniformSeries(0.0, 1.0, x));
    std::size_t skip = n / 10;
    for (std::size_t i = skip; i + skip < n; ++i) {
        double ang = 2.0 * kPi * f * static_cast<double>(i);
        CHECK(std::abs(z.values[i] - cplx(std::cos(ang), std::sin(ang))) < 1e-6);
    }
    // real part is the input
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(z.values[i].real() - x[i]) < 1e-9);
}

TEST_CASE("analytic_signal preserves DC") {
    auto z = analytic_signal(UniformSeries(0.0, 1.0, std::vector<double>(64, 3.25)));
    for (const auto& v : z.values) {
        CHECK(v.real() == doctest::Approx(3.25).epsilon(1e-10));
        CHECK(std::abs(v.imag()) < 1e-9);
    }
}

TEST_CASE("spwvd of zero input is zero") {
    ComplexSeries z;
    z.dt = 1.0;
    z.values.assign(256, cplx(0.0, 0.0));
    SpwvdConfig cfg{31, 15, 128, WindowShape::Hamming};
    auto map = spwvd(z, cfg);
    for (double v : map.values) CHECK(v == 0.0);
}

TEST_CASE("spwvd concentrates a pure tone at its frequency bin") {
    SpwvdConfig cfg{63, 31, 256, WindowShape::Hamming};
    const double f = 0.125;  // cycles/sample -> bin f*N = 32
    auto z = analytic_tone(512, f, 1.0);
    auto map = spwvd(z, cfg);
    for (std::size_t n = 100; n < 400; n += 37) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < map.freqs.size(); ++k)
            if (map.at(n, k) > map.at(n, best)) best = k;
        CHECK(best == 32);
    }
}

TEST_CASE("spwvd matches the naive double-sum oracle") {
    SpwvdConfig cfg{31, 15, 64, WindowShape::Hamming};
    // a deterministic two-tone input, length <= 256
    ComplexSeries z;
    z.dt = 1.0;
    z.values.resize(200);
    for (std::size_t i = 0; i < 200; ++i) {
        double t = static_cast<double>(i);
        double a1 = 2.0 * kPi * 0.08 * t;
        double a2 = 2.0 * kPi * 0.21 * t;
        z.values[i] = cplx(std::cos(a1), std::sin(a1)) + 0.7 * cplx(std::cos(a2), std::sin(a2));
    }
    auto map = spwvd(z, cfg);
    double scale = 0.0;
    for (double v : map.values) scale = std::max(scale, std::abs(v));
    for (std::size_t n : {0u, 17u, 100u, 199u})
        for (std::size_t k : {0u, 5u, 16u, 32u}) {
            double ref = naive_spwvd_point(z, cfg, n, k);
            CHECK(std::abs(map.at(n, k) - ref) < 1e-9 * scale);
        }
}

TEST_CASE("smoothing suppresses the midpoint cross-term of a two-tone signal") {
    const std::size_t len = 512;
    ComplexSeries z;
    z.dt = 1.0;
    z.values.resize(len);
    const double f1 = 0.10, f2 = 0.20;
    for (std::size_t i = 0; i < len; ++i) {
        double t = static_cast<double>(i);
        double a1 = 2.0 * kPi * f1 * t, a2 = 2.0 * kPi * f2 * t;
        z.values[i] = cplx(std::cos(a1), std::sin(a1)) + cplx(std::cos(a2), std::sin(a2));
    }
    const std::size_t nfb = 256;
    const std::size_t k_mid = static_cast<std::size_t>(0.5 * (f1 + f2) * nfb);  // 38.4 -> 38
    const std::size_t k_auto = static_cast<std::size_t>(f1 * nfb);

    SpwvdConfig smoothed{63, 31, nfb, WindowShape::Hamming};
    SpwvdConfig unsmoothed{63, 1, nfb, WindowShape::Rectangular};
    auto ms = spwvd(z, smoothed);
    auto mu = spwvd(z, unsmoothed);

    double s_cross = 0.0, s_auto = 0.0, u_cross = 0.0, u_auto = 0.0;
    for (std::size_t n = 150; n < 350; ++n) {
        s_cross = std::max(s_cross, std::abs(ms.at(n, k_mid)));
        s_auto = std::max(s_auto, std::abs(ms.at(n, k_auto)));
        u_cross = std::max(u_cross, std::abs(mu.at(n, k_mid)));
        u_auto = std::max(u_auto, std::abs(mu.at(n, k_auto)));
    }
    CHECK(s_cross < 0.05 * s_auto);   // smoothed: cross-term below 5% of the auto-term
    CHECK(u_cross > 0.20 * u_auto);   // unsmoothed: oscillatory cross-term clearly present
}

TEST_CASE("time-shift covariance of the map") {
    SpwvdConfig cfg{31, 15, 128, WindowShape::Hamming};
    const std::size_t len = 300, shift = 7;
    auto z1 = analytic_tone(len, 0.11, 1.0);
    ComplexSeries z2 = z1;
    // shift: z2(n) = z1(n - shift), refilled from the same tone formula
    for (std::size_t i = 0; i < len; ++i) {
        double ang = 2.0 * kPi * 0.11 * (static_cast<double>(i) - static_cast<double>(shift));
        z2.values[i] = cplx(std::cos(ang), std::sin(ang));
    }
    auto m1 = spwvd(z1, cfg);
    auto m2 = spwvd(z2, cfg);
    double scale = 0.0;
    for (double v : m1.values) scale = std::max(scale, std::abs(v));
    for (std::size_t n = 50; n < 250; n += 11)
        for (std::size_t k = 0; k < m1.freqs.size(); k += 9)
            CHECK(std::abs(m2.at(n + shift, k) - m1.at(n, k)) < 1e-9 * scale);
}

TEST_CASE("moments: pure tone power and frequency") {
    SpwvdConfig cfg{63, 31, 256, WindowShape::Hamming};
    const double f = 0.125, amp = 3.0;
    auto z = analytic_tone(1024, f, 1.0, amp);
    auto map = spwvd(z, cfg);
    auto mom = instantaneous_moments(map);

    std::size_t margin = cfg.interior_margin();
    double mean_p = 0.0, n_p = 0.0;
    for (std::size_t i = margin; i + margin < mom.ipow.size(); ++i) {
        mean_p += mom.ipow.values[i];
        n_p += 1.0;
    }
    mean_p /= n_p;
    double var = 0.0;
    for (std::size_t i = margin; i + margin < mom.ipow.size(); ++i)
        var += (mom.ipow.values[i] - mean_p) * (mom.ipow.values[i] - mean_p);
    CHECK(std::sqrt(var / n_p) / mean_p < 0.01);  // relative std < 1%

    double bin = map.freq_step();
    for (std::size_t i = margin; i + margin < mom.ipow.size(); i += 41)
        CHECK(std::abs(mom.ifreq.values[i] - f) <= bin);
}

TEST_CASE("moments: zero map gives zero power and gap markers") {
    TimeFrequencyMap m;
    m.dt = 1.0;
    m.freqs = {0.0, 0.1, 0.2};
    m.n_times = 5;
    m.values.assign(15, 0.0);
    auto mom = instantaneous_moments(m);
    for (double p : mom.ipow.values) CHECK(p == 0.0);
    for (double fq : mom.ifreq.values) CHECK(is_gap(fq));
}

TEST_CASE("bilinearity: scaling the input scales power by c^2") {
    SpwvdConfig cfg{31, 15, 128, WindowShape::Hamming};
    auto z1 = analytic_tone(300, 0.1, 1.0, 1.0);
    auto z2 = analytic_tone(300, 0.1, 1.0, 2.5);
    auto p1 = instantaneous_moments(spwvd(z1, cfg));
    auto p2 = instantaneous_moments(spwvd(z2, cfg));
    std::size_t margin = cfg.interior_margin();
    for (std::size_t i = margin; i + margin < p1.ipow.size(); i += 13) {
        CHECK(p2.ipow.values[i] == doctest::Approx(6.25 * p1.ipow.values[i]).epsilon(1e-9));
        CHECK(p2.ifreq.values[i] == doctest::Approx(p1.ifreq.values[i]).epsilon(1e-9));
    }
}

TEST_CASE("unsmoothed WVD energy marginal within 1% on the interior") {
    SpwvdConfig cfg{127, 1, 512, WindowShape::Rectangular};
    const std::size_t len = 1024;
    const double f = 133.0 / static_cast<double>(len);  // exact DFT bin
    std::vector<double> x(len);
    for (std::size_t i = 0; i < len; ++i) x[i] = std::cos(2.0 * kPi * f * static_cast<double>(i));
    auto z = analytic_signal(UniformSeries(0.0, 1.0, x));
    auto mom = instantaneous_moments(spwvd(z, cfg));
    std::size_t margin = cfg.interior_margin();
    double e_map = 0.0, e_sig = 0.0;
    for (std::size_t i = margin; i + margin < len; ++i) {
        e_map += mom.ipow.values[i] * 1.0;
        e_sig += x[i] * x[i] * 1.0;
    }
    CHECK(std::abs(e_map - e_sig) / e_sig < 0.01);
}

TEST_CASE("calibration closure: unit and scaled tones map to their amplitude") {
    SpwvdConfig cfg{63, 31, 256, WindowShape::Hamming};
    auto band = BandSpec::band_pass(10.5 * 24.0, 21.0 * 24.0);
    double alpha = calibrate_amplitude(cfg, band, 24.0, 127);
    CHECK(alpha > 0.0);

    const double f = band.center_frequency();
    const std::size_t len = 2048;
    for (double amp : {1.0, 3.5}) {
        std::vector<double> x(len);
        for (std::size_t i = 0; i < len; ++i)
            x[i] = amp * std::sin(2.0 * kPi * f * 24.0 * static_cast<double>(i));
        auto b = extract_band(UniformSeries(0.0, 24.0, x), band, 127);
        auto mom = instantaneous_moments(spwvd(analytic_signal(b), cfg));
        auto iamp = instantaneous_amplitude(mom.ipow, alpha);
        std::size_t margin = cfg.interior_margin() + 63;
        for (std::size_t i = margin; i + margin < len; i += 101)
            CHECK(std::abs(iamp.values[i] - amp) / amp < 0.02);
    }
}

TEST_CASE("instantaneous_amplitude arithmetic and negative-power policy") {
    UniformSeries p4(0.0, 1.0, std::vector<double>(10, 4.0));
    auto a = instantaneous_amplitude(p4, 0.5);
    for (double v : a.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    UniformSeries z(0.0, 1.0, std::vector<double>(10, 0.0));
    for (double v : instantaneous_amplitude(z, 2.0).values) CHECK(v == 0.0);

    UniformSeries tiny_neg(0.0, 1.0, {1.0, -1e-15, 2.0});
    auto t = instantaneous_amplitude(tiny_neg, 1.0);
    CHECK(t.values[1] == 0.0);

    UniformSeries bad(0.0, 1.0, {1.0, -0.5, 2.0});
    CHECK_THROWS(instantaneous_amplitude(bad, 1.0));
}

TEST_CASE("spwvd output is identical across thread counts") {
    SpwvdConfig cfg{63, 31, 256, WindowShape::Hamming};
    auto z = analytic_tone(400, 0.09, 1.0);
    auto m1 = spwvd(z, cfg, 1);
    auto m4 = spwvd(z, cfg, 4);
    REQUIRE(m1.values.size() == m4.values.size());
    for (std::size_t i = 0; i < m1.values.size(); ++i) CHECK(m1.values[i] == m4.values[i]);
}

TEST_CASE("spwvd rejects too-short input") {
    SpwvdConfig cfg{63, 31, 256, WindowShape::Hamming};
    auto z = analytic_tone(64, 0.1, 1.0);
    CHECK_THROWS(spwvd(z, cfg));
}

#ifndef LHSIM_PIPELINE_HPP
#define LHSIM_PIPELINE_HPP

// Scenario orchestration: simulate the model, run the analysis chain
// (spline resampling, band extraction, SPWVD, phase detection), and emit
// machine-readable report tables with a run manifest.

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "io.hpp"
#include "model.hpp"
#include "phases.hpp"
#include "preprocess.hpp"
#include "series.hpp"
#include "tfr.hpp"

namespace lhsim {

constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct AnalysisConfig {
    double daily_dt = 24.0;  // hours
    BandSpec lf = BandSpec::low_pass(152.0 * kHoursPerDay);
    BandSpec hf = BandSpec::band_pass(10.5 * kHoursPerDay, 21.0 * kHoursPerDay);
    std::size_t num_taps = 255;
    SpwvdConfig spwvd;
    PhaseDetectConfig phase;

    /// Daily samples on each side excluded from phase statistics: the SPWVD
    /// zero-padding margin. The FIR stage needs no margin of its own because
    /// it reflection-pads the series ends.
    std::size_t margin_samples() const { return spwvd.interior_margin(); }
};

struct ScenarioConfig {
    PspikeProfile profile;
    SecretionParams secretion;
    SamplingSchedule schedule;      // start_offset is set from warmup
    double warmup = 0.0;            // hours before sampling begins
    double sampled_span = 41136.0;  // hours of sampled data
    double fine_dt = 0.01;          // hours
    AnalysisConfig analysis;
    std::string output_dir = "out";

    double horizon() const { return warmup + sampled_span + 1.0; }

    void check() const {
        profile.check();
        secretion.check();
        schedule.check();
        analysis.phase.check();
        analysis.spwvd.check();
        if (warmup < 0.0 || sampled_span <= 0.0)
            throw std::invalid_argument("ScenarioConfig: bad warmup/sampled_span");
    }
};

/// Reference parameter set: sinusoidal interspike-interval drive. The first
/// photoperiod cycle is simulated as warmup and the following four years are
/// sampled, one activity phase per year; the last phase runs into the end of
/// the record and is reported truncated.
inline ScenarioConfig default_sinusoid_scenario(std::uint64_t seed = 20020114) {
    ScenarioConfig cfg;
    cfg.profile = PspikeProfile::sinusoid(1.5, 36.0, 8760.0);
    cfg.secretion = SecretionParams{150.0, 2.0, 6.0};
    cfg.schedule = SamplingSchedule{84.0, 0.5, seed, 0.0};
    cfg.warmup = 8760.0;
    cfg.sampled_span = 4.0 * 8760.0;
    return cfg;
}

/// Damped drive (zeta = 0.14): simulate the first photoperiod as warmup and
/// sample from t = p_photo on.
inline ScenarioConfig default_damped_scenario(std::uint64_t seed = 20020114) {
    ScenarioConfig cfg = default_sinusoid_scenario(seed);
    cfg.profile = PspikeProfile::damped_sinusoid(1.5, 36.0, 8760.0, 0.14);
    return cfg;
}

// ---------------------------------------------------------------------------
// JSON round-trip (duration keys carry their unit in the name)
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    auto& p = j["profile"];
    switch (cfg.profile.kind) {
        case PspikeKind::Constant: p["kind"] = "constant"; break;
        case PspikeKind::Sinusoid: p["kind"] = "sinusoid"; break;
        case PspikeKind::DampedSinusoid: p["kind"] = "damped_sinusoid"; break;
    }
    p["p_const_hours"] = cfg.profile.p_const;
    p["p_min_hours"] = cfg.profile.p_min;
    p["p_max_hours"] = cfg.profile.p_max;
    p["p_photo_hours"] = cfg.profile.p_photo;
    p["zeta"] = cfg.profile.zeta;
    j["secretion"] = {{"a_spike_ng", cfg.secretion.a_spike},
                      {"k_hl_per_hour", cfg.secretion.k_hl},
                      {"alpha_clear_per_hour", cfg.secretion.alpha_clear}};
    j["schedule"] = {{"base_interval_hours", cfg.schedule.base_interval},
                     {"jitter_halfwidth_hours", cfg.schedule.jitter_halfwidth},
                     {"seed", cfg.schedule.seed}};
    j["simulation"] = {{"warmup_hours", cfg.warmup},
                       {"sampled_span_hours", cfg.sampled_span},
                       {"fine_dt_hours", cfg.fine_dt}};
    auto& a = j["analysis"];
    a["daily_dt_hours"] = cfg.analysis.daily_dt;
    a["lf_cutoff_period_days"] = cfg.analysis.lf.cutoff_period / kHoursPerDay;
    a["hf_short_period_days"] = cfg.analysis.hf.short_period / kHoursPerDay;
    a["hf_long_period_days"] = cfg.analysis.hf.long_period / kHoursPerDay;
    a["num_taps"] = cfg.analysis.num_taps;
    a["spwvd"] = {{"h_len", cfg.analysis.spwvd.h_len},
                  {"g_len", cfg.analysis.spwvd.g_len},
                  {"n_freq_bins", cfg.analysis.spwvd.n_freq_bins},
                  {"window", cfg.analysis.spwvd.window_shape == WindowShape::Hamming
                                 ? "hamming"
                                 : (cfg.analysis.spwvd.window_shape == WindowShape::Gaussian
                                        ? "gaussian"
                                        : "rectangular")}};
    a["phase"] = {{"level_threshold_ng_ml", cfg.analysis.phase.level_threshold},
                  {"slope_threshold_ng_ml_per_day", cfg.analysis.phase.slope_threshold}};
    j["output_dir"] = cfg.output_dir;
    return j;
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    ScenarioConfig cfg;
    const auto& p = j.at("profile");
    std::string kind = p.at("kind").get<std::string>();
    if (kind == "constant") {
        cfg.profile = PspikeProfile::constant(p.at("p_const_hours").get<double>());
    } else if (kind == "sinusoid") {
        cfg.profile = PspikeProfile::sinusoid(p.at("p_min_hours").get<double>(),
                                              p.at("p_max_hours").get<double>(),
                                              p.at("p_photo_hours").get<double>());
    } else if (kind == "damped_sinusoid") {
        cfg.profile = PspikeProfile::damped_sinusoid(
            p.at("p_min_hours").get<double>(), p.at("p_max_hours").get<double>(),
            p.at("p_photo_hours").get<double>(), p.at("zeta").get<double>());
    } else {
        throw std::invalid_argument("scenario_from_json: unknown profile kind '" + kind + "'");
    }
    const auto& s = j.at("secretion");
    cfg.secretion = {s.at("a_spike_ng").get<double>(), s.at("k_hl_per_hour").get<double>(),
                     s.at("alpha_clear_per_hour").get<double>()};
    const auto& sc = j.at("schedule");
    cfg.schedule.base_interval = sc.at("base_interval_hours").get<double>();
    cfg.schedule.jitter_halfwidth = sc.at("jitter_halfwidth_hours").get<double>();
    cfg.schedule.seed = sc.at("seed").get<std::uint64_t>();
    const auto& sim = j.at("simulation");
    cfg.warmup = sim.at("warmup_hours").get<double>();
    cfg.sampled_span = sim.at("sampled_span_hours").get<double>();
    cfg.fine_dt = sim.at("fine_dt_hours").get<double>();
    const auto& a = j.at("analysis");
    cfg.analysis.daily_dt = a.at("daily_dt_hours").get<double>();
    cfg.analysis.lf = BandSpec::low_pass(a.at("lf_cutoff_period_days").get<double>() * kHoursPerDay);
    cfg.analysis.hf = BandSpec::band_pass(a.at("hf_short_period_days").get<double>() * kHoursPerDay,
                                          a.at("hf_long_period_days").get<double>() * kHoursPerDay);
    cfg.analysis.num_taps = a.at("num_taps").get<std::size_t>();
    const auto& w = a.at("spwvd");
    cfg.analysis.spwvd.h_len = w.at("h_len").get<std::size_t>();
    cfg.analysis.spwvd.g_len = w.at("g_len").get<std::size_t>();
    cfg.analysis.spwvd.n_freq_bins = w.at("n_freq_bins").get<std::size_t>();
    std::string win = w.at("window").get<std::string>();
    cfg.analysis.spwvd.window_shape = win == "gaussian"
                                          ? WindowShape::Gaussian
                                          : (win == "rectangular" ? WindowShape::Rectangular
                                                                  : WindowShape::Hamming);
    const auto& ph = a.at("phase");
    cfg.analysis.phase.level_threshold = ph.at("level_threshold_ng_ml").get<double>();
    cfg.analysis.phase.slope_threshold = ph.at("slope_threshold_ng_ml_per_day").get<double>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    cfg.check();
    return cfg;
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_scenario: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_scenario: " + path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// Analysis chain
// ---------------------------------------------------------------------------

struct AnalysisResult {
    UniformSeries daily;
    UniformSeries lf_band, hf_band;
    UniformSeries lf_amp, hf_amp;          // full span, calibrated
    UniformSeries lf_amp_interior;         // edge margins stripped
    double alpha_lf = 0.0, alpha_hf = 0.0;
    std::size_t margin_samples = 0;
    std::vector<PhaseInterval> intervals;  // on the interior series
    std::vector<PhaseRecord> records;
};

namespace detail {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("[") + name + "] " + e.what());
    }
}

}  // namespace detail

inline UniformSeries trim_margins(const UniformSeries& s, std::size_t margin) {
    if (s.size() <= 2 * margin)
        throw std::invalid_argument("trim_margins: series shorter than twice the margin");
    std::vector<double> v(s.values.begin() + static_cast<long>(margin),
                          s.values.end() - static_cast<long>(margin));
    return UniformSeries(s.time_at(margin), s.dt, std::move(v));
}

/// Run the full analysis chain on one raw irregular series. Each stage
/// failure is rethrown with a stage tag.
inline AnalysisResult analyze_series(const IrregularSeries& raw, const AnalysisConfig& cfg,
                                     unsigned n_threads = 1) {
    AnalysisResult r;
    r.daily = detail::stage("resample", [&] { return resample_spline(raw, cfg.daily_dt); });
    r.lf_band = detail::stage("lf_band", [&] { return extract_band(r.daily, cfg.lf, cfg.num_taps); });
    r.hf_band = detail::stage("hf_band", [&] { return extract_band(r.daily, cfg.hf, cfg.num_taps); });

    auto amp_chain = [&](const UniformSeries& band, const BandSpec& spec, double& alpha_out) {
        auto z = analytic_signal(band);
        auto map = spwvd(z, cfg.spwvd, n_threads);
        auto mom = instantaneous_moments(map);
        alpha_out = calibrate_amplitude(cfg.spwvd, spec, cfg.daily_dt, cfg.num_taps);
        return instantaneous_amplitude(mom.ipow, alpha_out);
    };
    r.lf_amp = detail::stage("lf_spwvd", [&] { return amp_chain(r.lf_band, cfg.lf, r.alpha_lf); });
    r.hf_amp = detail::stage("hf_spwvd", [&] { return amp_chain(r.hf_band, cfg.hf, r.alpha_hf); });

    r.margin_samples = cfg.margin_samples();
    r.lf_amp_interior =
        detail::stage("trim", [&] { return trim_margins(r.lf_amp, r.margin_samples); });
    r.intervals =
        detail::stage("detect", [&] { return detect_phases(r.lf_amp_interior, cfg.phase); });
    r.records = detail::stage(
        "params", [&] { return extract_phase_params(r.lf_amp_interior, r.intervals); });
    return r;
}

// ---------------------------------------------------------------------------
// Scenario run and reporting
// ---------------------------------------------------------------------------

struct ReportBundle {
    ScenarioConfig config;
    IrregularSeries raw;
    AnalysisResult analysis;
    std::optional<CohortSummary> cohort;
    std::vector<std::vector<PhaseRecord>> per_animal;  // multi-animal runs
};

inline IrregularSeries simulate_raw(const ScenarioConfig& cfg) {
    cfg.check();
    auto fine = detail::stage("integrate", [&] {
        return integrate_plasma(cfg.secretion, cfg.profile, cfg.horizon(), cfg.fine_dt);
    });
    SamplingSchedule sched = cfg.schedule;
    // offset by the jitter halfwidth so jittered times stay inside the
    // integrated support even with zero warmup
    sched.start_offset = cfg.warmup + sched.jitter_halfwidth;
    std::size_t n_samples =
        static_cast<std::size_t>(std::floor(cfg.sampled_span / sched.base_interval)) + 1;
    return detail::stage("sample", [&] { return sample_series(fine, sched, n_samples); });
}

inline ReportBundle run_scenario(const ScenarioConfig& cfg, unsigned n_threads = 1) {
    ReportBundle b;
    b.config = cfg;
    b.raw = simulate_raw(cfg);
    b.analysis = analyze_series(b.raw, cfg.analysis, n_threads);
    return b;
}

inline void write_phase_table(const std::filesystem::path& path,
                              const std::vector<PhaseRecord>& records) {
    std::vector<std::vector<double>> cols(10);
    for (const auto& r : records) {
        cols[0].push_back(r.t1);
        cols[1].push_back(r.t2);
        cols[2].push_back(r.xmin);
        cols[3].push_back(r.vmin);
        cols[4].push_back(r.xmax);
        cols[5].push_back(r.vmax);
        cols[6].push_back(r.mean_amp);
        cols[7].push_back(r.maxmin_amp);
        cols[8].push_back(r.duration);
        cols[9].push_back(r.truncated ? 1.0 : 0.0);
    }
    write_table(path,
                "t1_days,t2_days,xmin_days,vmin_ng_ml,xmax_days,vmax_ng_ml,"
                "mean_amp_ng_ml_day,maxmin_amp_ng_ml,duration_days,truncated",
                cols);
}

inline void write_cohort_table(const std::filesystem::path& dir, const CohortSummary& s) {
    {
        std::vector<std::vector<double>> cols(4);
        for (std::size_t p = 0; p < s.synchrony.size(); ++p) {
            cols[0].push_back(static_cast<double>(p));
            cols[1].push_back(s.synchrony[p].sem_xmin);
            cols[2].push_back(s.synchrony[p].sem_xmax);
            cols[3].push_back(static_cast<double>(s.synchrony[p].n_animals));
        }
        write_table(dir / "cohort_synchrony.csv",
                    "phase_index,sem_xmin_days,sem_xmax_days,n_animals", cols);
    }
    std::ofstream out(dir / "cohort_anova.csv");
    out << "parameter,f,p\n";
    for (const auto& ps : s.parameters)
        if (ps.anova_available)
            out << ps.name << "," << format_value(ps.anova_f) << "," << format_value(ps.anova_p)
                << "\n";
}

/// Write all bundle tables plus a manifest carrying the config hash, seed
/// and tool version.
inline void emit_report(const ReportBundle& b, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    export_series(dir / "raw.csv", b.raw);
    export_uniform_days(dir / "daily.csv", b.analysis.daily, "value_ng_ml");
    export_uniform_days(dir / "lf_band.csv", b.analysis.lf_band, "value_ng_ml");
    export_uniform_days(dir / "hf_band.csv", b.analysis.hf_band, "value_ng_ml");
    export_uniform_days(dir / "lf_amp.csv", b.analysis.lf_amp, "amplitude_ng_ml");
    export_uniform_days(dir / "hf_amp.csv", b.analysis.hf_amp, "amplitude_ng_ml");
    write_phase_table(dir / "phases.csv", b.analysis.records);
    if (b.cohort) write_cohort_table(dir, *b.cohort);

    nlohmann::json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["seed"] = b.config.schedule.seed;
    nlohmann::json cfg_json = to_json(b.config);
    manifest["config"] = cfg_json;
    manifest["config_hash"] = fnv1a(cfg_json.dump());
    manifest["alpha_cal_lf"] = b.analysis.alpha_lf;
    manifest["alpha_cal_hf"] = b.analysis.alpha_hf;
    manifest["margin_days"] = b.analysis.margin_samples;
    manifest["n_phases"] = b.analysis.records.size();
    std::filesystem::path tmp = dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp);
        out << manifest.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, dir / "manifest.json");
}

}  // namespace lhsim

#endif

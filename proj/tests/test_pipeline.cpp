#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lhsim/pipeline.hpp"

using namespace lhsim;
namespace fs = std::filesystem;

namespace {

// scaled-down scenario for fast end-to-end checks
ScenarioConfig small_scenario(std::uint64_t seed) {
    ScenarioConfig cfg = default_sinusoid_scenario(seed);
    cfg.analysis.spwvd.h_len = 31;
    cfg.analysis.spwvd.g_len = 15;
    cfg.analysis.spwvd.n_freq_bins = 128;
    cfg.analysis.num_taps = 63;
    cfg.sampled_span = 1.5 * 8760.0;
    cfg.fine_dt = 0.02;
    return cfg;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("lhsim_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("scenario config JSON round-trip") {
    auto cfg = default_damped_scenario(777);
    auto j = to_json(cfg);
    auto back = scenario_from_json(j);
    CHECK(back.profile.kind == cfg.profile.kind);
    CHECK(back.profile.zeta == cfg.profile.zeta);
    CHECK(back.schedule.seed == cfg.schedule.seed);
    CHECK(back.warmup == cfg.warmup);
    CHECK(back.sampled_span == cfg.sampled_span);
    CHECK(back.analysis.lf.cutoff_period == cfg.analysis.lf.cutoff_period);
    CHECK(back.analysis.spwvd.h_len == cfg.analysis.spwvd.h_len);
    CHECK(back.analysis.phase.slope_threshold == cfg.analysis.phase.slope_threshold);
    CHECK(to_json(back).dump() == j.dump());
}

TEST_CASE("series export/import round-trip") {
    TempDir tmp;
    IrregularSeries s;
    for (int i = 0; i < 10; ++i) {
        s.times.push_back(84.0 * i + 0.123456789 * i);
        s.values.push_back(1.0 / (1.0 + i));
    }
    export_series(tmp.path / "raw.csv", s);
    auto back = import_series(tmp.path / "raw.csv");
    REQUIRE(back.series.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(back.series.times[i] == doctest::Approx(s.times[i]).epsilon(1e-8));
        CHECK(back.series.values[i] == doctest::Approx(s.values[i]).epsilon(1e-8));
    }
    // assay-floor flagging
    CHECK(back.below_floor[5] == (s.values[5] < 0.2));
}

TEST_CASE("import_series reports malformed rows and bad timestamps") {
    TempDir tmp;
    {
        std::ofstream f(tmp.path / "bad.csv");
        f << "time_hours,value_ng_ml\n0,1.0\n84,x\n";
    }
    CHECK_THROWS_WITH_AS(import_series(tmp.path / "bad.csv"), doctest::Contains(":3"),
                         std::runtime_error);
    {
        std::ofstream f(tmp.path / "dup.csv");
        f << "time_hours,value_ng_ml\n0,1.0\n84,2.0\n84,3.0\n";
    }
    CHECK_THROWS_WITH_AS(import_series(tmp.path / "dup.csv"), doctest::Contains(":4"),
                         std::runtime_error);
}

TEST_CASE("daily table day/hour conversion round-trip") {
    TempDir tmp;
    UniformSeries u(48.0, 24.0, {1.0, 2.0, 3.0, 4.0});
    export_uniform_days(tmp.path / "u.csv", u, "value_ng_ml");
    auto back = import_uniform_days(tmp.path / "u.csv");
    CHECK(back.t0 == doctest::Approx(48.0).epsilon(1e-9));
    CHECK(back.dt == doctest::Approx(24.0).epsilon(1e-9));
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(back.values[i] == doctest::Approx(u.values[i]).epsilon(1e-9));
}

TEST_CASE("simulate_raw is deterministic in the seed") {
    auto cfg = small_scenario(4242);
    auto a = simulate_raw(cfg);
    auto b = simulate_raw(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.times[i] == b.times[i]);
        CHECK(a.values[i] == b.values[i]);
    }
    cfg.schedule.seed = 4243;
    auto c = simulate_raw(cfg);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size() && !any_diff; ++i) any_diff = a.times[i] != c.times[i];
    CHECK(any_diff);
}

TEST_CASE("run_scenario end-to-end, identical across thread counts") {
    auto cfg = small_scenario(99);
    auto b1 = run_scenario(cfg, 1);
    auto b4 = run_scenario(cfg, 4);
    REQUIRE(b1.analysis.lf_amp.size() == b4.analysis.lf_amp.size());
    for (std::size_t i = 0; i < b1.analysis.lf_amp.size(); ++i) {
        CHECK(b1.analysis.lf_amp.values[i] == b4.analysis.lf_amp.values[i]);
        CHECK(b1.analysis.hf_amp.values[i] == b4.analysis.hf_amp.values[i]);
    }
    CHECK(b1.analysis.records.size() == b4.analysis.records.size());
    // 1.5 sampled years under sinusoidal drive: at least one activity phase
    CHECK(b1.analysis.records.size() >= 1);
}

TEST_CASE("emit_report writes all tables plus a manifest with the config hash") {
    TempDir tmp;
    auto cfg = small_scenario(7);
    auto bundle = run_scenario(cfg, 2);
    emit_report(bundle, tmp.path);
    for (const char* name : {"raw.csv", "daily.csv", "lf_band.csv", "hf_band.csv", "lf_amp.csv",
                             "hf_amp.csv", "phases.csv", "manifest.json"})
        CHECK(fs::exists(tmp.path / name));

    std::ifstream mf(tmp.path / "manifest.json");
    nlohmann::json manifest;
    mf >> manifest;
    CHECK(manifest.at("config_hash").get<std::uint64_t>() ==
          fnv1a(to_json(bundle.config).dump()));
    CHECK(manifest.at("seed").get<std::uint64_t>() == 7);

    // re-read a table and compare to the in-memory bundle
    auto lf = import_uniform_days(tmp.path / "lf_amp.csv");
    REQUIRE(lf.size() == bundle.analysis.lf_amp.size());
    for (std::size_t i = 0; i < lf.size(); i += 17)
        CHECK(lf.values[i] ==
              doctest::Approx(bundle.analysis.lf_amp.values[i]).epsilon(1e-8));
}

TEST_CASE("empty phase list yields a header-only phase table") {
    TempDir tmp;
    write_phase_table(tmp.path / "phases.csv", {});
    std::ifstream f(tmp.path / "phases.csv");
    std::string line;
    int lines = 0;
    while (std::getline(f, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 1);
}

TEST_CASE("stage errors carry a stage tag") {
    IrregularSeries tiny;
    tiny.times = {0.0, 1.0, 2.0};
    tiny.values = {0.0, 0.0, 0.0};
    AnalysisConfig cfg;
    CHECK_THROWS_WITH_AS(analyze_series(tiny, cfg), doctest::Contains("[resample]"),
                         std::runtime_error);
}

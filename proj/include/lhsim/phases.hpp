#ifndef LHSIM_PHASES_HPP
#define LHSIM_PHASES_HPP

// Activity-phase detection on the LF instantaneous-amplitude series and
// extraction of the per-phase secretion parameters, plus cohort statistics
// across animals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "series.hpp"
#include "stats.hpp"

namespace lhsim {

struct PhaseDetectConfig {
    double level_threshold = 0.2;    // ng/ml
    double slope_threshold = 7e-3;   // ng/ml/day

    void check() const {
        if (!(level_threshold > 0.0 && slope_threshold > 0.0))
            throw std::invalid_argument("PhaseDetectConfig: thresholds must be > 0");
    }
};

/// Half-open activity interval in grid indices plus day times.
struct PhaseInterval {
    std::size_t i1 = 0, i2 = 0;  // grid indices, inclusive
    double t1 = 0.0, t2 = 0.0;   // days
    bool truncated = false;
};

struct PhaseRecord {
    double t1 = 0.0, t2 = 0.0;        // days
    double xmin = 0.0, vmin = 0.0;    // preceding LF minimum (day, ng/ml)
    double xmax = 0.0, vmax = 0.0;    // phase LF maximum (day, ng/ml)
    double mean_amp = 0.0;            // ng/ml/day
    double maxmin_amp = 0.0;          // ng/ml
    double duration = 0.0;            // days; NaN when truncated
    double cycle_period = 0.0;        // days to next phase maximum; NaN for last
    bool truncated = false;
};

/// Detect activity intervals on a daily LF-amplitude series. A phase opens
/// where the central-difference derivative crosses slope_threshold from
/// below while the level is above level_threshold; it closes at the first of
/// (a) the derivative, having been negative, increasing above
/// -slope_threshold, or (b) the level dropping to the threshold. Intervals
/// still open at the series end are flagged truncated.
inline std::vector<PhaseInterval> detect_phases(const UniformSeries& lf_amp,
                                                const PhaseDetectConfig& cfg) {
    cfg.check();
    if (std::abs(lf_amp.dt - kHoursPerDay) > 1e-9)
        throw std::invalid_argument("detect_phases: expects a daily grid (dt = 24 h)");
    const std::size_t len = lf_amp.size();
    if (len <= 30) throw std::invalid_argument("detect_phases: series must exceed 30 days");

    const auto& v = lf_amp.values;
    // central differences, per day
    std::vector<double> d(len, 0.0);
    for (std::size_t i = 1; i + 1 < len; ++i) d[i] = 0.5 * (v[i + 1] - v[i - 1]);
    d[0] = v[1] - v[0];
    d[len - 1] = v[len - 1] - v[len - 2];

    auto day_at = [&](std::size_t i) { return lf_amp.time_at(i) / kHoursPerDay; };

    std::vector<PhaseInterval> out;
    const double lvl = cfg.level_threshold, slp = cfg.slope_threshold;
    // entry = first index where both the level and the ascending-slope
    // condition hold, whichever of the two crossings comes last
    auto armed = [&](std::size_t i) { return v[i] > lvl && d[i] >= slp; };
    bool in_phase = false, seen_negative = false;
    std::size_t i1 = 0;
    for (std::size_t i = 1; i < len; ++i) {
        if (!in_phase) {
            if (armed(i) && !armed(i - 1)) {
                in_phase = true;
                seen_negative = false;
                i1 = i;
            }
            continue;
        }
        if (v[i] <= lvl) {
            if (i - 1 > i1) out.push_back({i1, i - 1, day_at(i1), day_at(i - 1), false});
            in_phase = false;
            continue;
        }
        if (d[i] < 0.0) seen_negative = true;
        if (seen_negative && d[i] > d[i - 1] && d[i] > -slp) {
            out.push_back({i1, i, day_at(i1), day_at(i), false});
            in_phase = false;
        }
    }
    if (in_phase && len - 1 > i1)
        out.push_back({i1, len - 1, day_at(i1), day_at(len - 1), true});
    return out;
}

/// Parameters per detected phase. xmin/vmin come from the gap preceding t1
/// (series start for the first phase). Plateau maxima tie-break to the
/// earliest grid point; a tied preceding minimum resolves to the latest
/// point so midpoint durations reflect the flank adjacent to the phase.
/// Truncated phases carry NaN duration and cycle period.
inline std::vector<PhaseRecord> extract_phase_params(const UniformSeries& lf_amp,
                                                     const std::vector<PhaseInterval>& intervals) {
    const auto& v = lf_amp.values;
    const std::size_t len = lf_amp.size();
    auto day_at = [&](std::size_t i) { return lf_amp.time_at(i) / kHoursPerDay; };
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto argmin_on = [&](std::size_t a, std::size_t b) {  // inclusive, earliest tie
        std::size_t best = a;
        for (std::size_t i = a + 1; i <= b; ++i)
            if (v[i] < v[best]) best = i;
        return best;
    };
    // for the minimum preceding a phase, ties resolve toward the phase onset
    auto argmin_on_last = [&](std::size_t a, std::size_t b) {  // inclusive, latest tie
        std::size_t best = b;
        for (std::size_t i = b; i-- > a;)
            if (v[i] < v[best]) best = i;
        return best;
    };
    auto argmax_on = [&](std::size_t a, std::size_t b) {
        std::size_t best = a;
        for (std::size_t i = a + 1; i <= b; ++i)
            if (v[i] > v[best]) best = i;
        return best;
    };

    std::vector<PhaseRecord> out;
    std::vector<std::size_t> ixmax(intervals.size()), ixmin(intervals.size());
    for (std::size_t p = 0; p < intervals.size(); ++p) {
        const auto& iv = intervals[p];
        if (iv.i2 >= len || iv.i1 > iv.i2)
            throw std::invalid_argument("extract_phase_params: interval outside series");
        std::size_t gap_start = (p == 0) ? 0 : intervals[p - 1].i2;
        ixmin[p] = argmin_on_last(gap_start, iv.i1);
        ixmax[p] = argmax_on(iv.i1, iv.i2);
    }

    for (std::size_t p = 0; p < intervals.size(); ++p) {
        const auto& iv = intervals[p];
        PhaseRecord rec;
        rec.t1 = iv.t1;
        rec.t2 = iv.t2;
        rec.truncated = iv.truncated;
        rec.xmin = day_at(ixmin[p]);
        rec.vmin = v[ixmin[p]];
        rec.xmax = day_at(ixmax[p]);
        rec.vmax = v[ixmax[p]];
        rec.maxmin_amp = rec.vmax - rec.vmin;

        double amp_sum = 0.0;
        for (std::size_t i = ixmin[p]; i <= ixmax[p]; ++i) amp_sum += v[i];
        std::size_t ndays = std::max<std::size_t>(1, ixmax[p] - ixmin[p]);
        rec.mean_amp = amp_sum / static_cast<double>(ndays);

        // next inter-phase minimum for the duration midpoints
        if (iv.truncated) {
            rec.duration = nan;
        } else {
            std::size_t gap_end = (p + 1 < intervals.size()) ? intervals[p + 1].i1 : len - 1;
            std::size_t inext = argmin_on(iv.i2, gap_end);
            double mid1 = 0.5 * (rec.xmin + rec.xmax);
            double mid2 = 0.5 * (rec.xmax + day_at(inext));
            rec.duration = mid2 - mid1;
        }
        rec.cycle_period = (p + 1 < intervals.size())
                               ? day_at(ixmax[p + 1]) - day_at(ixmax[p])
                               : nan;
        out.push_back(rec);
    }
    return out;
}

struct SynchronyResult {
    double sem_xmin = 0.0;  // days
    double sem_xmax = 0.0;  // days
    std::size_t n_animals = 0;
};

/// Cross-animal SEM of the phase-minimum and phase-maximum occurrence times
/// for one phase index. Needs the phase present in at least two animals.
inline SynchronyResult cohort_synchrony(const std::vector<std::vector<PhaseRecord>>& per_animal,
                                        std::size_t phase_index) {
    std::vector<double> xmins, xmaxs;
    for (const auto& recs : per_animal)
        if (phase_index < recs.size()) {
            xmins.push_back(recs[phase_index].xmin);
            xmaxs.push_back(recs[phase_index].xmax);
        }
    if (xmins.size() < 2)
        throw std::invalid_argument("cohort_synchrony: phase present in fewer than 2 animals");
    return {sem_of(xmins), sem_of(xmaxs), xmins.size()};
}

struct ParameterSummary {
    std::string name;
    std::vector<double> phase_mean;  // per phase across animals
    std::vector<double> phase_sem;
    double anova_f = 0.0;
    double anova_p = 1.0;
    bool anova_available = false;
};

struct CohortSummary {
    std::vector<SynchronyResult> synchrony;  // per phase index
    std::vector<ParameterSummary> parameters;
};

/// Mean +/- SEM per phase and repeated-measures ANOVA per parameter, over
/// the phases present (with finite values) in every animal.
inline CohortSummary summarize_cohort(const std::vector<std::vector<PhaseRecord>>& per_animal) {
    if (per_animal.size() < 2)
        throw std::invalid_argument("summarize_cohort: need >= 2 animals");
    std::size_t n_phases = per_animal.front().size();
    for (const auto& recs : per_animal) n_phases = std::min(n_phases, recs.size());
    if (n_phases == 0) throw std::invalid_argument("summarize_cohort: an animal has no phases");

    CohortSummary s;
    for (std::size_t p = 0; p < n_phases; ++p) s.synchrony.push_back(cohort_synchrony(per_animal, p));

    struct Field {
        const char* name;
        double PhaseRecord::*ptr;
    };
    const Field fields[] = {
        {"vmin", &PhaseRecord::vmin},         {"vmax", &PhaseRecord::vmax},
        {"mean_amp", &PhaseRecord::mean_amp}, {"maxmin_amp", &PhaseRecord::maxmin_amp},
        {"duration", &PhaseRecord::duration},
    };
    for (const auto& f : fields) {
        ParameterSummary ps;
        ps.name = f.name;
        std::vector<std::size_t> usable;  // phases finite in every animal
        for (std::size_t p = 0; p < n_phases; ++p) {
            std::vector<double> vals;
            for (const auto& recs : per_animal) vals.push_back(recs[p].*(f.ptr));
            bool finite = std::all_of(vals.begin(), vals.end(),
                                      [](double x) { return std::isfinite(x); });
            ps.phase_mean.push_back(finite ? mean_of(vals)
                                           : std::numeric_limits<double>::quiet_NaN());
            ps.phase_sem.push_back(finite ? sem_of(vals)
                                          : std::numeric_limits<double>::quiet_NaN());
            if (finite) usable.push_back(p);
        }
        if (usable.size() >= 2) {
            std::vector<std::vector<double>> matrix;
            for (const auto& recs : per_animal) {
                std::vector<double> row;
                for (std::size_t p : usable) row.push_back(recs[p].*(f.ptr));
                matrix.push_back(std::move(row));
            }
            auto res = rm_anova(matrix);
            ps.anova_f = res.f;
            ps.anova_p = res.p;
            ps.anova_available = true;
        }
        s.parameters.push_back(std::move(ps));
    }
    return s;
}

}  // namespace lhsim

#endif

#pragma once

// Operational emissions: PUE overhead plus integration of energy against a
// step-function grid carbon intensity. Energy and intensity rarely share a
// time grid, so each energy interval is cut at intensity boundaries and its
// joules are spread uniformly over the pieces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "carbondef/def_model.hpp"
#include "carbondef/errors.hpp"
#include "carbondef/number_format.hpp"

namespace carbondef {

inline constexpr double kJoulesPerKwh = 3.6e6;

/// Intensity (kgCO2e/kWh) held constant over [start, end).
struct IntensityEntry {
    Timestamp start = 0;
    Timestamp end = 0;
    double kg_per_kwh = 0.0;
};

struct IntensitySeries {
    std::string region;
    std::vector<IntensityEntry> entries;  // sorted, disjoint; gaps allowed
};

/// Throws unless every entry is a non-empty interval with a finite,
/// non-negative intensity, and entries are sorted and disjoint.
inline void validate_intensity(const IntensitySeries& series) {
    for (std::size_t i = 0; i < series.entries.size(); ++i) {
        const auto& e = series.entries[i];
        std::string where = "/entries/" + std::to_string(i);
        if (e.end <= e.start) throw IntervalError("end must be after start", where);
        if (!std::isfinite(e.kg_per_kwh) || e.kg_per_kwh < 0.0)
            throw NegativeIntensityError("intensity must be >= 0", where);
        if (i > 0) {
            const auto& prev = series.entries[i - 1];
            if (e.start < prev.start)
                throw OverlapError("entries are not sorted by start", where);
            if (e.start < prev.end)
                throw OverlapError("entry overlaps [" + format_number(prev.start) + ", " +
                                       format_number(prev.end) + ")",
                                   where);
        }
    }
}

/// Dimensionless facility overhead multiplier, never below 1.
class PueFactor {
public:
    explicit PueFactor(double value) : value_(value) {
        if (!std::isfinite(value) || value < 1.0)
            throw SpecError("PUE must be >= 1, got " + format_number(value));
    }

    double value() const noexcept { return value_; }

private:
    double value_;
};

inline double apply_pue(double joules, PueFactor pue) noexcept { return joules * pue.value(); }

/// Piece of one energy interval that falls inside one intensity interval.
struct Segment {
    Timestamp start = 0;
    double duration_s = 0.0;
    double joules = 0.0;
    double kg_per_kwh = 0.0;
    std::size_t energy_index = 0;
    std::size_t intensity_index = 0;
};

/// Piece of an energy interval with no intensity data.
struct UncoveredSpan {
    Timestamp start = 0;
    double duration_s = 0.0;
    double joules = 0.0;
    std::size_t energy_index = 0;

    double end() const noexcept { return static_cast<double>(start) + duration_s; }
};

struct Alignment {
    std::vector<Segment> segments;
    std::vector<UncoveredSpan> uncovered;
};

namespace detail {

inline void check_energy_order(const EnergySeries& energy) {
    for (std::size_t i = 0; i < energy.entries.size(); ++i) {
        const auto& e = energy.entries[i];
        if (!(e.duration_s > 0.0))
            throw TraceOrderError("energy interval has non-positive duration",
                                  "entry " + std::to_string(i));
        if (i > 0) {
            const auto& prev = energy.entries[i - 1];
            if (e.start < prev.start || !ends_before(prev.start, prev.duration_s, e.start))
                throw TraceOrderError("energy entries overlap or are unsorted",
                                      "entry " + std::to_string(i));
        }
    }
}

}  // namespace detail

/// Splits every energy interval at intensity boundaries.
///
/// Offsets inside an interval are kept relative to its start so epoch-sized
/// timestamps never enter floating-point subtraction.
inline Alignment align_segments(const EnergySeries& energy, const IntensitySeries& intensity) {
    detail::check_energy_order(energy);
    validate_intensity(intensity);

    const auto& steps = intensity.entries;
    Alignment out;
    for (std::size_t ei = 0; ei < energy.entries.size(); ++ei) {
        const auto& e = energy.entries[ei];
        const double length = e.duration_s;
        const double joules = e.joules.total_j;

        auto uncovered = [&](double from, double to) {
            out.uncovered.push_back({e.start + static_cast<Timestamp>(from), to - from,
                                     joules * ((to - from) / length), ei});
        };

        auto first = std::partition_point(steps.begin(), steps.end(),
                                          [&](const IntensityEntry& s) { return s.end <= e.start; });
        double cursor = 0.0;
        for (auto it = first;
             it != steps.end() && static_cast<double>(it->start - e.start) < length; ++it) {
            double from = std::max(0.0, static_cast<double>(it->start - e.start));
            double to = std::min(length, static_cast<double>(it->end - e.start));
            if (from > cursor) uncovered(cursor, from);
            out.segments.push_back({e.start + static_cast<Timestamp>(from), to - from,
                                    joules * ((to - from) / length), it->kg_per_kwh, ei,
                                    static_cast<std::size_t>(it - steps.begin())});
            cursor = to;
        }
        if (cursor < length) uncovered(cursor, length);
    }
    return out;
}

enum class CoveragePolicy { strict, skip_uncovered };

inline constexpr std::string_view to_string(CoveragePolicy p) noexcept {
    return p == CoveragePolicy::strict ? "strict" : "skip_uncovered";
}

struct EmissionsInterval {
    Timestamp start = 0;
    double duration_s = 0.0;
    double joules = 0.0;  // before PUE
    double kg_per_kwh = 0.0;
    double kg_co2e = 0.0;  // after PUE
};

struct EmissionsReport {
    double total_kg_co2e = 0.0;
    std::vector<EmissionsInterval> intervals;
    double pue = 1.0;
    CoveragePolicy policy = CoveragePolicy::strict;
    double input_joules = 0.0;    // everything in the energy series, before PUE
    double covered_joules = 0.0;  // the part that met intensity data, before PUE
    std::vector<UncoveredSpan> uncovered;

    double uncovered_joules() const noexcept {
        double sum = 0.0;
        for (const auto& u : uncovered) sum += u.joules;
        return sum;
    }
};

inline EmissionsReport operational_emissions(const EnergySeries& energy,
                                             const IntensitySeries& intensity, PueFactor pue,
                                             CoveragePolicy policy) {
    Alignment aligned = align_segments(energy, intensity);
    if (policy == CoveragePolicy::strict && !aligned.uncovered.empty()) {
        const auto& gap = aligned.uncovered.front();
        throw CoverageError("energy in [" + format_number(gap.start) + ", " +
                            format_number(gap.end()) + ") is not covered by intensity data for " +
                            "region '" + intensity.region + "'");
    }

    EmissionsReport report;
    report.pue = pue.value();
    report.policy = policy;
    report.input_joules = energy.total_joules();
    report.intervals.reserve(aligned.segments.size());
    for (const auto& s : aligned.segments) {
        double kg = pue.value() * (s.kg_per_kwh * s.joules) / kJoulesPerKwh;
        report.intervals.push_back({s.start, s.duration_s, s.joules, s.kg_per_kwh, kg});
        report.covered_joules += s.joules;
        report.total_kg_co2e += kg;
    }
    report.uncovered = std::move(aligned.uncovered);
    return report;
}

}  // namespace carbondef

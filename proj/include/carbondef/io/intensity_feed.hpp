#pragma once

// Carbon-intensity feed:
//   {"region": string,
//    "entries": [{"start": int, "end": int, "intensity_kg_per_kwh": number}]}

#include <algorithm>
#include <string>
#include <string_view>

#include "carbondef/grid_integration.hpp"
#include "carbondef/io/json_util.hpp"

namespace carbondef::io {

/// Parses, sorts by start and validates. Locations of semantic errors refer
/// to positions in the input document.
inline IntensitySeries intensity_from_json(const json& doc, const std::string& where = {}) {
    require_object(doc, where);
    IntensitySeries series;
    series.region = get_string(doc, "region", where);
    std::string entries_at = child(where, "entries");
    const json& entries = require_array(member(doc, "entries", where), entries_at);

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        std::string loc = child(entries_at, i);
        const json& e = require_object(entries[i], loc);
        IntensityEntry entry;
        entry.start = get_int(e, "start", loc);
        entry.end = get_int(e, "end", loc);
        entry.kg_per_kwh = get_number(e, "intensity_kg_per_kwh", loc);
        if (entry.end <= entry.start) throw IntervalError("end must be after start", loc);
        if (entry.kg_per_kwh < 0.0) throw NegativeIntensityError("intensity must be >= 0", loc);
        series.entries.push_back(entry);
        order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return series.entries[a].start < series.entries[b].start;
    });
    IntensitySeries sorted{series.region, {}};
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& e = series.entries[order[k]];
        if (k > 0 && e.start < sorted.entries.back().end)
            throw OverlapError("entry overlaps [" + format_number(sorted.entries.back().start) +
                                   ", " + format_number(sorted.entries.back().end) + ")",
                               child(entries_at, order[k]));
        sorted.entries.push_back(e);
    }
    return sorted;
}

inline IntensitySeries parse_intensity_feed(std::string_view text) {
    return intensity_from_json(parse_json(text));
}

inline ordered_json intensity_to_json(const IntensitySeries& series) {
    ordered_json entries = ordered_json::array();
    for (const auto& e : series.entries) {
        ordered_json row;
        row["start"] = e.start;
        row["end"] = e.end;
        row["intensity_kg_per_kwh"] = e.kg_per_kwh;
        entries.push_back(std::move(row));
    }
    ordered_json doc;
    doc["region"] = series.region;
    doc["entries"] = std::move(entries);
    return doc;
}

inline std::string serialize_intensity_feed(const IntensitySeries& series) {
    return dump_canonical(intensity_to_json(series));
}

}  // namespace carbondef::io

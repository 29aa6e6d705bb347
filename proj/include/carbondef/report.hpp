#pragma once

// Report documents for the CLI. Internals stay in joules; everything is
// converted to kWh here, once, on the way out. Numbers are written in the
// shortest form that round-trips, so identical inputs give identical bytes.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carbondef/def_model.hpp"
#include "carbondef/embodied_ledger.hpp"
#include "carbondef/grid_integration.hpp"
#include "carbondef/io/json_util.hpp"
#include "carbondef/number_format.hpp"
#include "carbondef/sci.hpp"

namespace carbondef::report {

using io::ordered_json;

inline constexpr const char* kToolName = "carbondef";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;
inline constexpr double kConservationTolerance = 1e-9;

inline double kwh(double joules) noexcept { return joules / kJoulesPerKwh; }

struct Meta {
    std::map<std::string, std::string> input_sha256;  // input name -> digest
    std::optional<Timestamp> window_start;
    std::optional<double> window_end;
};

inline Meta window_of(const EnergySeries& series) {
    Meta m;
    if (!series.empty()) {
        m.window_start = series.entries.front().start;
        const auto& last = series.entries.back();
        m.window_end = static_cast<double>(last.start) + last.duration_s;
    }
    return m;
}

inline ordered_json meta_json(const Meta& m) {
    ordered_json inputs = ordered_json::object();
    for (const auto& [k, v] : m.input_sha256) inputs[k] = v;
    ordered_json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["inputs_sha256"] = std::move(inputs);
    if (m.window_start)
        doc["window"] = ordered_json{{"start", *m.window_start}, {"end", *m.window_end}};
    else
        doc["window"] = nullptr;
    return doc;
}

inline ordered_json components_kwh(const ComponentEnergy& e) {
    return ordered_json{{"cpu", kwh(e.cpu_j)},   {"mem", kwh(e.mem_j)},
                        {"io", kwh(e.io_j)},     {"net", kwh(e.net_j)},
                        {"idle", kwh(e.idle_j)}};
}

inline std::vector<std::size_t> clamped_samples(const EnergySeries& series) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < series.entries.size(); ++i)
        if (series.entries[i].clamped) out.push_back(i);
    return out;
}

inline ordered_json energy_json(const EnergySeries& series, bool with_entries) {
    ComponentEnergy totals = series.totals();
    double seconds = 0.0;
    for (const auto& e : series.entries) seconds += e.duration_s;
    ordered_json doc;
    doc["intervals"] = series.entries.size();
    doc["duration_s"] = seconds;
    doc["total_kwh"] = kwh(totals.total_j);
    doc["by_component_kwh"] = components_kwh(totals);
    if (with_entries) {
        ordered_json rows = ordered_json::array();
        for (const auto& e : series.entries) {
            ordered_json row;
            row["start"] = e.start;
            row["duration_s"] = e.duration_s;
            row["total_kwh"] = kwh(e.joules.total_j);
            row["by_component_kwh"] = components_kwh(e.joules);
            row["clamped"] = e.clamped;
            rows.push_back(std::move(row));
        }
        doc["entries"] = std::move(rows);
    }
    return doc;
}

inline ordered_json uncovered_json(const EmissionsReport& r) {
    ordered_json rows = ordered_json::array();
    for (const auto& u : r.uncovered)
        rows.push_back(ordered_json{{"start", u.start}, {"duration_s", u.duration_s},
                                    {"kwh", kwh(u.joules)}});
    return rows;
}

inline ordered_json operational_json(const EmissionsReport& r, const std::string& region) {
    ordered_json rows = ordered_json::array();
    for (const auto& i : r.intervals) {
        ordered_json row;
        row["start"] = i.start;
        row["duration_s"] = i.duration_s;
        row["kwh"] = kwh(i.joules);
        row["intensity_kg_per_kwh"] = i.kg_per_kwh;
        row["kg_co2e"] = i.kg_co2e;
        rows.push_back(std::move(row));
    }
    ordered_json doc;
    doc["region"] = region;
    doc["pue"] = r.pue;
    doc["coverage_policy"] = std::string(to_string(r.policy));
    doc["input_kwh"] = kwh(r.input_joules);
    doc["covered_kwh"] = kwh(r.covered_joules);
    doc["total_kg_co2e"] = r.total_kg_co2e;
    doc["intervals"] = std::move(rows);
    return doc;
}

struct ObjectSummary {
    std::string id;
    double lifecycle_kg = 0.0;
    double attributed_kg = 0.0;
    double idle_residual_kg = 0.0;
};

struct EmbodiedSummary {
    std::optional<std::string> consumer_filter;
    std::vector<ConsumerAttribution> consumers;
    std::vector<ObjectSummary> objects;  // ledger order
    double lifecycle_kg = 0.0;
    double attributed_kg = 0.0;  // all consumers, all objects
    double idle_residual_kg = 0.0;
    std::vector<std::string> warnings;

    /// Embodied emissions charged to the run: the filtered consumer, or
    /// every consumer when there is no filter.
    double charged_kg() const noexcept {
        double sum = 0.0;
        for (const auto& c : consumers) sum += c.total_kg_co2e;
        return sum;
    }

    bool balanced() const noexcept {
        double scale = std::max(1.0, std::abs(lifecycle_kg));
        return std::abs(attributed_kg + idle_residual_kg - lifecycle_kg) <=
               kConservationTolerance * scale;
    }
};

inline EmbodiedSummary summarize_embodied(const Ledger& ledger,
                                          const std::optional<std::string>& consumer) {
    EmbodiedSummary s;
    s.consumer_filter = consumer;
    if (consumer) {
        auto known = ledger.consumers();
        if (!std::binary_search(known.begin(), known.end(), *consumer))
            s.warnings.push_back("consumer '" + *consumer + "' has no records in the ledger");
        s.consumers.push_back(consumer_embodied(ledger, *consumer));
    } else {
        for (const auto& id : ledger.consumers()) s.consumers.push_back(consumer_embodied(ledger, id));
    }
    for (const auto& o : ledger.objects()) {
        ObjectSummary row;
        row.id = o.id;
        row.lifecycle_kg = lifecycle_total(o);
        row.idle_residual_kg = idle_residual(ledger, o.id);
        row.attributed_kg = row.lifecycle_kg - row.idle_residual_kg;
        s.lifecycle_kg += row.lifecycle_kg;
        s.attributed_kg += row.attributed_kg;
        s.idle_residual_kg += row.idle_residual_kg;
        s.objects.push_back(std::move(row));
    }
    return s;
}

inline ordered_json embodied_json(const EmbodiedSummary& s) {
    ordered_json consumers = ordered_json::array();
    for (const auto& c : s.consumers) {
        ordered_json objects = ordered_json::array();
        for (const auto& o : c.by_object)
            objects.push_back(ordered_json{{"object_id", o.object_id}, {"kg_co2e", o.kg_co2e}});
        consumers.push_back(ordered_json{{"consumer_id", c.consumer_id},
                                         {"kg_co2e", c.total_kg_co2e},
                                         {"objects", std::move(objects)}});
    }
    ordered_json objects = ordered_json::array();
    for (const auto& o : s.objects)
        objects.push_back(ordered_json{{"id", o.id},
                                       {"lifecycle_kg_co2e", o.lifecycle_kg},
                                       {"attributed_kg_co2e", o.attributed_kg},
                                       {"idle_residual_kg_co2e", o.idle_residual_kg}});
    ordered_json doc;
    doc["consumer_filter"] = s.consumer_filter ? ordered_json(*s.consumer_filter) : ordered_json();
    doc["kg_co2e"] = s.charged_kg();
    doc["consumers"] = std::move(consumers);
    doc["objects"] = std::move(objects);
    doc["conservation"] = ordered_json{{"lifecycle_kg_co2e", s.lifecycle_kg},
                                       {"attributed_kg_co2e", s.attributed_kg},
                                       {"idle_residual_kg_co2e", s.idle_residual_kg},
                                       {"balanced", s.balanced()}};
    return doc;
}

inline ordered_json sci_json(const CarbonTotals& t, const OverheadSplit& split) {
    ordered_json doc;
    doc["software_kwh"] = kwh(split.software_joules);
    doc["overhead_kwh"] = kwh(split.overhead_joules);
    doc["operational_kg_co2e"] = t.operational_kg;
    doc["embodied_kg_co2e"] = t.embodied_kg;
    doc["total_kg_co2e"] = t.total_kg;
    doc["functional_unit"] = ordered_json{{"name", t.functional_unit_name},
                                          {"count", t.functional_unit_count}};
    doc["sci_kg_per_unit"] = t.sci_kg_per_unit;
    return doc;
}

inline ordered_json header(const char* kind, const Meta& meta) {
    ordered_json doc;
    doc["kind"] = kind;
    doc["schema_version"] = kSchemaVersion;
    doc["meta"] = meta_json(meta);
    return doc;
}

inline ordered_json string_array(const std::vector<std::string>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& s : v) a.push_back(s);
    return a;
}

// --- whole documents ---------------------------------------------------

inline ordered_json estimate_document(const Meta& meta, const EnergySeries& energy) {
    ordered_json doc = header("estimate", meta);
    doc["energy"] = energy_json(energy, true);
    doc["diagnostics"] = ordered_json{{"clamped_samples", clamped_samples(energy)}};
    return doc;
}

inline ordered_json emissions_document(const Meta& meta, const EnergySeries& energy,
                                       const EmissionsReport& ops, const std::string& region) {
    ordered_json doc = header("emissions", meta);
    doc["energy"] = energy_json(energy, false);
    doc["operational"] = operational_json(ops, region);
    doc["diagnostics"] = ordered_json{{"clamped_samples", clamped_samples(energy)},
                                      {"uncovered", uncovered_json(ops)},
                                      {"uncovered_kwh", kwh(ops.uncovered_joules())}};
    return doc;
}

inline ordered_json embodied_document(const Meta& meta, const EmbodiedSummary& summary) {
    ordered_json doc = header("embodied", meta);
    doc["embodied"] = embodied_json(summary);
    doc["diagnostics"] = ordered_json{{"warnings", string_array(summary.warnings)}};
    return doc;
}

struct FullReport {
    Meta meta;
    EnergySeries energy;
    EmissionsReport operational;
    std::string region;
    EmbodiedSummary embodied;
    OverheadSplit split;
    CarbonTotals totals;
};

inline FullReport compose_report(Meta meta, EnergySeries energy, EmissionsReport ops,
                                 std::string region, EmbodiedSummary embodied,
                                 const std::string& unit_name, double unit_count) {
    FullReport r;
    r.meta = std::move(meta);
    r.split = overhead_split(ops);
    r.totals = compose_totals(ops.total_kg_co2e, embodied.charged_kg(), unit_name, unit_count);
    r.energy = std::move(energy);
    r.operational = std::move(ops);
    r.region = std::move(region);
    r.embodied = std::move(embodied);
    return r;
}

inline ordered_json report_document(const FullReport& r) {
    ordered_json doc = header("report", r.meta);
    doc["energy"] = energy_json(r.energy, false);
    doc["operational"] = operational_json(r.operational, r.region);
    doc["embodied"] = embodied_json(r.embodied);
    doc["sci"] = sci_json(r.totals, r.split);
    doc["diagnostics"] = ordered_json{{"clamped_samples", clamped_samples(r.energy)},
                                      {"uncovered", uncovered_json(r.operational)},
                                      {"uncovered_kwh", kwh(r.operational.uncovered_joules())},
                                      {"warnings", string_array(r.embodied.warnings)}};
    return doc;
}

// --- CSV (long format, one row per interval) -----------------------------

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline std::string estimate_csv(const EnergySeries& energy) {
    std::string out = "start,duration_s,cpu_kwh,mem_kwh,io_kwh,net_kwh,idle_kwh,total_kwh,clamped\n";
    for (const auto& e : energy.entries) {
        out += format_number(e.start) + "," + format_number(e.duration_s);
        for (double j : {e.joules.cpu_j, e.joules.mem_j, e.joules.io_j, e.joules.net_j,
                         e.joules.idle_j, e.joules.total_j})
            out += "," + format_number(kwh(j));
        out += e.clamped ? ",true\n" : ",false\n";
    }
    return out;
}

inline std::string emissions_csv(const EmissionsReport& ops) {
    struct Row {
        Timestamp start;
        std::string line;
    };
    std::vector<Row> rows;
    for (const auto& i : ops.intervals)
        rows.push_back({i.start, format_number(i.start) + "," + format_number(i.duration_s) + "," +
                                     format_number(kwh(i.joules)) + "," +
                                     format_number(i.kg_per_kwh) + "," +
                                     format_number(i.kg_co2e) + ",true\n"});
    for (const auto& u : ops.uncovered)
        rows.push_back({u.start, format_number(u.start) + "," + format_number(u.duration_s) + "," +
                                     format_number(kwh(u.joules)) + ",,0,false\n"});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.start < b.start; });
    std::string out = "start,duration_s,kwh,intensity_kg_per_kwh,kg_co2e,covered\n";
    for (const auto& r : rows) out += r.line;
    return out;
}

inline std::string embodied_csv(const EmbodiedSummary& s) {
    std::string out = "row,consumer_id,object_id,kg_co2e\n";
    for (const auto& c : s.consumers) {
        for (const auto& o : c.by_object)
            out += "attribution," + detail::csv_field(c.consumer_id) + "," +
                   detail::csv_field(o.object_id) + "," + format_number(o.kg_co2e) + "\n";
        if (c.by_object.empty())
            out += "attribution," + detail::csv_field(c.consumer_id) + ",,0\n";
    }
    for (const auto& o : s.objects)
        out += "idle_residual,," + detail::csv_field(o.id) + "," +
               format_number(o.idle_residual_kg) + "\n";
    out += "conservation_lifecycle,,," + format_number(s.lifecycle_kg) + "\n";
    out += "conservation_attributed,,," + format_number(s.attributed_kg) + "\n";
    out += "conservation_idle_residual,,," + format_number(s.idle_residual_kg) + "\n";
    return out;
}

inline std::string report_csv(const FullReport& r) {
    std::string out = "section,metric,value\n";
    auto row = [&](const char* section, const char* metric, double v) {
        out += std::string(section) + "," + metric + "," + format_number(v) + "\n";
    };
    ComponentEnergy e = r.energy.totals();
    row("energy", "total_kwh", kwh(e.total_j));
    row("energy", "cpu_kwh", kwh(e.cpu_j));
    row("energy", "mem_kwh", kwh(e.mem_j));
    row("energy", "io_kwh", kwh(e.io_j));
    row("energy", "net_kwh", kwh(e.net_j));
    row("energy", "idle_kwh", kwh(e.idle_j));
    row("operational", "pue", r.operational.pue);
    row("operational", "covered_kwh", kwh(r.operational.covered_joules));
    row("operational", "uncovered_kwh", kwh(r.operational.uncovered_joules()));
    row("operational", "kg_co2e", r.operational.total_kg_co2e);
    row("embodied", "kg_co2e", r.embodied.charged_kg());
    row("embodied", "idle_residual_kg_co2e", r.embodied.idle_residual_kg);
    row("sci", "software_kwh", kwh(r.split.software_joules));
    row("sci", "overhead_kwh", kwh(r.split.overhead_joules));
    row("sci", "total_kg_co2e", r.totals.total_kg);
    row("sci", "functional_unit_count", r.totals.functional_unit_count);
    row("sci", "sci_kg_per_unit", r.totals.sci_kg_per_unit);
    return out;
}

}  // namespace carbondef::report

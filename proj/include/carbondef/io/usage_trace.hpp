#pragma once

// Usage traces in CSV or JSON.
//
// CSV: UTF-8, LF line endings, '.' decimal separator, header
//   timestamp_utc,duration_s,u_cpu_cores,u_mem_bytes,u_io_bytes,u_net_bytes
// Columns are matched by name; extra columns are ignored.
//
// JSON: {"samples": [{"timestamp_utc": int, "duration_s": number,
//                     "u_cpu_cores": number, ...}]}

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "carbondef/def_model.hpp"
#include "carbondef/errors.hpp"
#include "carbondef/io/json_util.hpp"
#include "carbondef/number_format.hpp"

namespace carbondef::io {

enum class TraceFormat { csv, json };

struct UsageTrace {
    std::vector<UsageSample> samples;
    // 1-based CSV line, or JSON array index, of each sample
    std::vector<std::size_t> rows;
};

inline constexpr std::array<std::string_view, 6> kTraceColumns = {
    "timestamp_utc", "duration_s", "u_cpu_cores", "u_mem_bytes", "u_io_bytes", "u_net_bytes"};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    for (;;) {
        std::size_t end = line.find(sep, begin);
        out.push_back(line.substr(begin, end == std::string_view::npos ? end : end - begin));
        if (end == std::string_view::npos) break;
        begin = end + 1;
    }
    return out;
}

inline std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

// Shared per-sample range checks; the caller supplies the location.
inline void check_sample_values(const UsageSample& s, const std::string& where) {
    if (!(s.duration_s > 0.0)) throw ParseError("duration_s must be > 0", where);
    for (Component c : kComponents)
        if (s[c] < 0.0)
            throw ParseError("usage " + std::string(to_string(c)) + " must be >= 0", where);
}

inline void check_order(const UsageTrace& trace, const std::vector<std::string>& where) {
    const auto& v = trace.samples;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i].start < v[i - 1].start)
            throw TraceOrderError("samples are not sorted by start", where[i]);
        if (!carbondef::detail::ends_before(v[i - 1].start, v[i - 1].duration_s, v[i].start))
            throw TraceOrderError("sample overlaps the previous one", where[i]);
    }
}

}  // namespace detail

inline UsageTrace parse_usage_trace_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<std::string_view> lines = detail::split(text, '\n');
    for (auto& l : lines)
        if (l.ends_with('\r')) l.remove_suffix(1);

    if (lines.empty() || lines.front().empty()) throw SchemaError("missing header row", "line 1");

    auto header = detail::split(lines.front(), ',');
    std::array<std::size_t, kTraceColumns.size()> column{};
    for (std::size_t k = 0; k < kTraceColumns.size(); ++k) {
        std::size_t found = header.size();
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == kTraceColumns[k]) found = j;
        if (found == header.size())
            throw SchemaError("missing column '" + std::string(kTraceColumns[k]) + "'", "line 1");
        column[k] = found;
    }

    UsageTrace trace;
    std::vector<std::string> where;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        std::string_view line = lines[n];
        if (line.empty()) continue;
        std::string loc = "line " + std::to_string(n + 1);
        auto fields = detail::split(line, ',');
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             loc);

        UsageSample s;
        auto ts = detail::to_int(fields[column[0]]);
        if (!ts) throw ParseError("timestamp_utc is not an integer", loc);
        s.start = *ts;
        std::array<double*, 5> targets = {&s.duration_s, &s.u_cpu, &s.u_mem, &s.u_io, &s.u_net};
        for (std::size_t k = 1; k < kTraceColumns.size(); ++k) {
            auto v = detail::to_double(fields[column[k]]);
            if (!v) throw ParseError(std::string(kTraceColumns[k]) + " is not a number", loc);
            *targets[k - 1] = *v;
        }
        detail::check_sample_values(s, loc);
        trace.samples.push_back(s);
        trace.rows.push_back(n + 1);
        where.push_back(std::move(loc));
    }
    detail::check_order(trace, where);
    return trace;
}

inline UsageTrace parse_usage_trace_json(std::string_view text) {
    json doc = parse_json(text);
    require_object(doc, "");
    const json& samples = require_array(member(doc, "samples", ""), "/samples");

    UsageTrace trace;
    std::vector<std::string> where;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::string loc = child(std::string("/samples"), i);
        const json& row = require_object(samples[i], loc);
        UsageSample s;
        s.start = get_int(row, "timestamp_utc", loc);
        s.duration_s = get_number(row, "duration_s", loc);
        s.u_cpu = get_number(row, "u_cpu_cores", loc);
        s.u_mem = get_number(row, "u_mem_bytes", loc);
        s.u_io = get_number(row, "u_io_bytes", loc);
        s.u_net = get_number(row, "u_net_bytes", loc);
        detail::check_sample_values(s, loc);
        trace.samples.push_back(s);
        trace.rows.push_back(i);
        where.push_back(std::move(loc));
    }
    detail::check_order(trace, where);
    return trace;
}

inline UsageTrace parse_usage_trace(std::string_view text, TraceFormat format) {
    return format == TraceFormat::csv ? parse_usage_trace_csv(text) : parse_usage_trace_json(text);
}

inline std::string serialize_usage_trace_csv(const UsageTrace& trace) {
    std::string out;
    for (std::size_t k = 0; k < kTraceColumns.size(); ++k) {
        if (k) out += ',';
        out += kTraceColumns[k];
    }
    out += '\n';
    for (const auto& s : trace.samples) {
        out += format_number(s.start);
        for (double v : {s.duration_s, s.u_cpu, s.u_mem, s.u_io, s.u_net}) {
            out += ',';
            out += format_number(v);
        }
        out += '\n';
    }
    return out;
}

inline std::string serialize_usage_trace_json(const UsageTrace& trace) {
    ordered_json samples = ordered_json::array();
    for (const auto& s : trace.samples) {
        ordered_json row;
        row["timestamp_utc"] = s.start;
        row["duration_s"] = s.duration_s;
        row["u_cpu_cores"] = s.u_cpu;
        row["u_mem_bytes"] = s.u_mem;
        row["u_io_bytes"] = s.u_io;
        row["u_net_bytes"] = s.u_net;
        samples.push_back(std::move(row));
    }
    ordered_json doc;
    doc["samples"] = std::move(samples);
    return dump_canonical(doc);
}

inline std::string serialize_usage_trace(const UsageTrace& trace, TraceFormat format) {
    return format == TraceFormat::csv ? serialize_usage_trace_csv(trace)
                                      : serialize_usage_trace_json(trace);
}

}  // namespace carbondef::io

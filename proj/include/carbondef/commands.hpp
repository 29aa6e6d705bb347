#pragma once

// The four CLI commands as plain functions: load inputs, run the pipeline,
// render the document. Nothing is written anywhere; callers decide.

#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "carbondef/def_model.hpp"
#include "carbondef/embodied_ledger.hpp"
#include "carbondef/grid_integration.hpp"
#include "carbondef/io/config.hpp"
#include "carbondef/io/digest.hpp"
#include "carbondef/io/feed_client.hpp"
#include "carbondef/io/files.hpp"
#include "carbondef/io/intensity_feed.hpp"
#include "carbondef/io/ledger_io.hpp"
#include "carbondef/io/usage_trace.hpp"
#include "carbondef/report.hpp"

namespace carbondef::commands {

namespace fs = std::filesystem;

struct Options {
    std::optional<fs::path> config;
    std::optional<fs::path> trace;
    std::optional<fs::path> ledger;
    std::optional<std::string> consumer;
    std::optional<io::OutputFormat> format;
    bool strict_coverage = false;
    bool clamp_usage = false;
    // overrides the feed client's wall clock (tests)
    std::function<Timestamp()> clock;
};

/// Context wrapped around an Error (via std::throw_with_nested) naming the
/// input file, and optionally the row, that caused it.
class InputFailure : public std::runtime_error {
public:
    InputFailure(const fs::path& file, std::string where)
        : std::runtime_error(file.string() + (where.empty() ? "" : ":" + where)),
          file_(file) {}

    const fs::path& file() const noexcept { return file_; }

private:
    fs::path file_;
};

struct Output {
    std::string body;
    std::vector<std::string> warnings;
};

namespace detail {

struct Loaded {
    io::RunConfig config;
    io::UsageTrace trace;
    EnergySeries energy;
    report::Meta meta;
};

inline const fs::path& require(const std::optional<fs::path>& p, const char* flag) {
    if (!p) throw SchemaError(std::string("missing required option ") + flag);
    return *p;
}

inline io::TraceFormat trace_format(const fs::path& p) {
    return p.extension() == ".json" ? io::TraceFormat::json : io::TraceFormat::csv;
}

template <class F>
auto in_file(const fs::path& file, F&& f, std::string where = {}) -> decltype(f()) {
    try {
        return f();
    } catch (const Error&) {
        std::throw_with_nested(InputFailure(file, std::move(where)));
    }
}

inline Loaded load_energy(const Options& opts) {
    Loaded l;
    const auto& config_path = require(opts.config, "--config");
    const auto& trace_path = require(opts.trace, "--trace");

    std::string config_text = io::read_file(config_path);
    l.config = in_file(config_path,
                       [&] { return io::parse_config(config_text, config_path.parent_path()); });
    if (opts.strict_coverage) l.config.coverage = CoveragePolicy::strict;
    if (opts.clamp_usage) l.config.clamp_usage = true;
    if (opts.format) l.config.output = *opts.format;

    std::string trace_text = io::read_file(trace_path);
    l.trace = in_file(trace_path,
                      [&] { return io::parse_usage_trace(trace_text, trace_format(trace_path)); });
    auto bounds = l.config.clamp_usage ? UsageBounds::clamp : UsageBounds::reject;
    // evaluate sample by sample first so a failure names the source row
    for (std::size_t i = 0; i < l.trace.samples.size(); ++i)
        in_file(trace_path, [&] { return component_power(l.config.server, l.trace.samples[i], bounds); },
                "row " + std::to_string(l.trace.rows[i]));
    l.energy = trace_to_energy_series(l.config.server, l.trace.samples, bounds);

    l.meta = report::window_of(l.energy);
    l.meta.input_sha256["config"] = io::sha256_hex(config_text);
    l.meta.input_sha256["trace"] = io::sha256_hex(trace_text);
    return l;
}

inline IntensitySeries load_intensity(const Options& opts, Loaded& l) {
    const auto& src = l.config.intensity;
    IntensitySeries series;
    if (src.file) {
        std::string text = io::read_file(*src.file);
        series = in_file(*src.file, [&] { return io::parse_intensity_feed(text); });
    } else if (l.energy.empty()) {
        series.region = src.region;  // nothing to look up
    } else {
        io::FeedClientOptions client;
        client.cache_dir = io::resolve_cache_dir(src.cache_dir);
        client.freshness_s = src.freshness_s;
        client.strict_freshness = src.strict_freshness;
        client.bearer_token = src.bearer_token;
        if (opts.clock) client.clock = opts.clock;
        io::FeedRequest req{src.endpoint, src.region, *l.meta.window_start,
                            static_cast<Timestamp>(std::ceil(*l.meta.window_end))};
        series = io::fetch_intensity(req, client).series;
    }
    l.meta.input_sha256["intensity"] = io::sha256_hex(io::serialize_intensity_feed(series));
    return series;
}

inline Ledger load_ledger(const fs::path& path, report::Meta& meta) {
    std::string text = io::read_file(path);
    meta.input_sha256["ledger"] = io::sha256_hex(text);
    return in_file(path, [&] { return io::parse_ledger(text); });
}

inline std::string render(const io::ordered_json& doc) { return io::dump_canonical(doc); }

}  // namespace detail

inline Output run_estimate(const Options& opts) {
    auto l = detail::load_energy(opts);
    if (l.config.output == io::OutputFormat::csv) return {report::estimate_csv(l.energy), {}};
    return {detail::render(report::estimate_document(l.meta, l.energy)), {}};
}

inline Output run_emissions(const Options& opts) {
    auto l = detail::load_energy(opts);
    IntensitySeries intensity = detail::load_intensity(opts, l);
    EmissionsReport ops = operational_emissions(l.energy, intensity, PueFactor(l.config.pue),
                                                l.config.coverage);
    Output out;
    if (!ops.uncovered.empty())
        out.warnings.push_back(format_number(report::kwh(ops.uncovered_joules())) +
                               " kWh fell outside intensity coverage and was skipped");
    if (l.config.output == io::OutputFormat::csv)
        out.body = report::emissions_csv(ops);
    else
        out.body = detail::render(report::emissions_document(l.meta, l.energy, ops, intensity.region));
    return out;
}

inline Output run_embodied(const Options& opts) {
    report::Meta meta;
    Ledger ledger = detail::load_ledger(detail::require(opts.ledger, "--ledger"), meta);
    auto summary = report::summarize_embodied(ledger, opts.consumer);
    Output out{{}, summary.warnings};
    if (opts.format == io::OutputFormat::csv)
        out.body = report::embodied_csv(summary);
    else
        out.body = detail::render(report::embodied_document(meta, summary));
    return out;
}

inline Output run_report(const Options& opts) {
    auto l = detail::load_energy(opts);
    IntensitySeries intensity = detail::load_intensity(opts, l);
    EmissionsReport ops = operational_emissions(l.energy, intensity, PueFactor(l.config.pue),
                                                l.config.coverage);
    Ledger ledger;
    if (opts.ledger) ledger = detail::load_ledger(*opts.ledger, l.meta);
    auto consumer = opts.consumer ? opts.consumer : l.config.consumer;
    auto summary = report::summarize_embodied(ledger, consumer);

    Output out{{}, summary.warnings};
    if (!ops.uncovered.empty())
        out.warnings.push_back(format_number(report::kwh(ops.uncovered_joules())) +
                               " kWh fell outside intensity coverage and was skipped");
    auto full = report::compose_report(std::move(l.meta), std::move(l.energy), std::move(ops),
                                       intensity.region, std::move(summary),
                                       l.config.functional_unit.name,
                                       l.config.functional_unit.count);
    if (l.config.output == io::OutputFormat::csv)
        out.body = report::report_csv(full);
    else
        out.body = detail::render(report::report_document(full));
    return out;
}

}  // namespace carbondef::commands

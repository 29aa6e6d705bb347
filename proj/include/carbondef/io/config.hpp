#pragma once

// Run configuration:
//   {"server": {"tdp_watts", "n_cpu", "alpha": {"cpu","mem","io","net"},
//               "u_max": {"cpu","mem","io","net", "units"?: {"mem","io","net"}},
//               "idle_watts"?},
//    "pue",
//    "intensity": {"file"} | {"endpoint", "region", "cache_dir"?, "freshness_s"?,
//                             "strict_freshness"?, "bearer_token"?},
//    "coverage_policy"?: "strict" | "skip_uncovered",
//    "functional_unit"?: {"name", "count"},
//    "clamp_usage"?: bool, "output"?: "json" | "csv", "consumer"?: string}
//
// Relative paths resolve against the directory holding the config file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "carbondef/def_model.hpp"
#include "carbondef/grid_integration.hpp"
#include "carbondef/io/files.hpp"
#include "carbondef/io/json_util.hpp"

namespace carbondef::io {

inline constexpr std::int64_t kDefaultFreshnessSeconds = 1800;

struct IntensitySource {
    std::optional<std::filesystem::path> file;
    std::string endpoint;
    std::string region;
    std::optional<std::string> bearer_token;
    std::optional<std::filesystem::path> cache_dir;
    std::int64_t freshness_s = kDefaultFreshnessSeconds;
    bool strict_freshness = false;
};

struct FunctionalUnit {
    std::string name = "run";
    double count = 1.0;
};

enum class OutputFormat { json, csv };

struct RunConfig {
    ServerSpec server;
    double pue = 1.0;
    IntensitySource intensity;
    CoveragePolicy coverage = CoveragePolicy::strict;
    FunctionalUnit functional_unit;
    bool clamp_usage = false;
    OutputFormat output = OutputFormat::json;
    std::optional<std::string> consumer;
};

namespace detail {

inline UsageUnit parse_unit(const json& units, std::string_view key, const std::string& where) {
    if (!units.contains(key)) return UsageUnit::bytes;
    std::string tag = get_string(units, key, where);
    if (tag == "bytes") return UsageUnit::bytes;
    if (tag == "bytes_per_interval") return UsageUnit::bytes_per_interval;
    throw SchemaError("unknown unit '" + tag + "'", child(where, key));
}

inline ServerSpec parse_server(const json& v) {
    const std::string at = "/server";
    require_object(v, at);
    ServerSpec spec;
    spec.tdp_watts = get_number(v, "tdp_watts", at);
    std::int64_t n = get_int(v, "n_cpu", at);
    if (n < 1 || n > INT32_MAX) throw SpecError("n_cpu must be >= 1", child(at, "n_cpu"));
    spec.n_cpu = static_cast<int>(n);

    std::string alpha_at = child(at, "alpha");
    const json& alpha = require_object(member(v, "alpha", at), alpha_at);
    spec.alpha = {get_number(alpha, "cpu", alpha_at), get_number(alpha, "mem", alpha_at),
                  get_number(alpha, "io", alpha_at), get_number(alpha, "net", alpha_at)};

    std::string umax_at = child(at, "u_max");
    const json& umax = require_object(member(v, "u_max", at), umax_at);
    spec.u_max = {get_number(umax, "cpu", umax_at), get_number(umax, "mem", umax_at),
                  get_number(umax, "io", umax_at), get_number(umax, "net", umax_at)};
    if (umax.contains("units")) {
        std::string units_at = child(umax_at, "units");
        const json& units = require_object(umax["units"], units_at);
        spec.units = {parse_unit(units, "mem", units_at), parse_unit(units, "io", units_at),
                      parse_unit(units, "net", units_at)};
    }
    if (v.contains("idle_watts")) spec.idle_watts = get_number(v, "idle_watts", at);

    try {
        return validate_spec(spec);
    } catch (const AllocationError& e) {
        throw AllocationError(e.what(), alpha_at);
    } catch (const SpecError& e) {
        throw SpecError(e.what(), at);
    }
}

inline std::filesystem::path resolve(const std::filesystem::path& base, std::string p) {
    std::filesystem::path path(std::move(p));
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
    json doc = parse_json(text);
    require_object(doc, "");
    RunConfig cfg;
    cfg.server = detail::parse_server(member(doc, "server", ""));

    cfg.pue = get_number(doc, "pue", "");
    if (cfg.pue < 1.0) throw SpecError("PUE must be >= 1", "/pue");

    const std::string src_at = "/intensity";
    const json& src = require_object(member(doc, "intensity", ""), src_at);
    bool has_file = src.contains("file");
    bool has_endpoint = src.contains("endpoint") || src.contains("region");
    if (has_file == has_endpoint)
        throw SchemaError("intensity needs exactly one source: \"file\" or \"endpoint\"+\"region\"",
                          src_at);
    if (has_file) {
        auto path = detail::resolve(base_dir, get_string(src, "file", src_at));
        if (!std::filesystem::exists(path))
            throw FileError("intensity file '" + path.string() + "' does not exist",
                            child(src_at, "file"));
        cfg.intensity.file = path;
    } else {
        cfg.intensity.endpoint = get_string(src, "endpoint", src_at);
        cfg.intensity.region = get_string(src, "region", src_at);
        if (src.contains("bearer_token"))
            cfg.intensity.bearer_token = get_string(src, "bearer_token", src_at);
        if (src.contains("cache_dir"))
            cfg.intensity.cache_dir = detail::resolve(base_dir, get_string(src, "cache_dir", src_at));
        if (src.contains("freshness_s")) {
            cfg.intensity.freshness_s = get_int(src, "freshness_s", src_at);
            if (cfg.intensity.freshness_s < 0)
                throw SchemaError("freshness_s must be >= 0", child(src_at, "freshness_s"));
        }
        if (src.contains("strict_freshness"))
            cfg.intensity.strict_freshness = get_bool(src, "strict_freshness", src_at);
    }

    if (doc.contains("coverage_policy")) {
        std::string p = get_string(doc, "coverage_policy", "");
        if (p == "strict")
            cfg.coverage = CoveragePolicy::strict;
        else if (p == "skip_uncovered")
            cfg.coverage = CoveragePolicy::skip_uncovered;
        else
            throw SchemaError("unknown coverage_policy '" + p + "'", "/coverage_policy");
    }
    if (doc.contains("functional_unit")) {
        const std::string fu_at = "/functional_unit";
        const json& fu = require_object(doc["functional_unit"], fu_at);
        cfg.functional_unit.name = get_string(fu, "name", fu_at);
        cfg.functional_unit.count = get_number(fu, "count", fu_at);
        if (!(cfg.functional_unit.count > 0.0))
            throw ZeroFunctionalUnits("functional unit count must be > 0", child(fu_at, "count"));
    }
    if (doc.contains("clamp_usage")) cfg.clamp_usage = get_bool(doc, "clamp_usage", "");
    if (doc.contains("output")) {
        std::string f = get_string(doc, "output", "");
        if (f == "json")
            cfg.output = OutputFormat::json;
        else if (f == "csv")
            cfg.output = OutputFormat::csv;
        else
            throw SchemaError("unknown output format '" + f + "'", "/output");
    }
    if (doc.contains("consumer")) cfg.consumer = get_string(doc, "consumer", "");
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path), path.parent_path());
}

}  // namespace carbondef::io

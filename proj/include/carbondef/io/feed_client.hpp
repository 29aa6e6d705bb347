#pragma once

// HTTP client for carbon-intensity feeds with an on-disk cache.
//
// Request: GET <endpoint>?region=R&start=S&end=E, optional bearer token.
// Response body: the intensity feed JSON (see intensity_feed.hpp).
//
// Each cache file holds one fetched window:
//   {"region", "window": {"start", "end"}, "fetched_at", "payload_digest",
//    "entries": [...]}
// and is named <region>-<digest of its content>.json.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "carbondef/grid_integration.hpp"
#include "carbondef/io/digest.hpp"
#include "carbondef/io/files.hpp"
#include "carbondef/io/intensity_feed.hpp"
#include "carbondef/io/json_util.hpp"

namespace carbondef::io {

inline constexpr const char* kCacheDirEnv = "CARBONDEF_CACHE_DIR";

struct FeedRequest {
    std::string endpoint;  // scheme://host[:port]/path
    std::string region;
    Timestamp start = 0;
    Timestamp end = 0;
};

struct FeedCacheEntry {
    std::string region;
    Timestamp window_start = 0;
    Timestamp window_end = 0;
    Timestamp fetched_at = 0;
    std::string payload_digest;
    IntensitySeries series;

    bool covers(Timestamp start, Timestamp end) const noexcept {
        return window_start <= start && end <= window_end;
    }
};

struct FeedClientOptions {
    std::filesystem::path cache_dir;
    std::int64_t freshness_s = 1800;
    bool strict_freshness = false;
    std::optional<std::string> bearer_token;
    std::chrono::seconds timeout{10};
    std::function<Timestamp()> clock = [] {
        return std::chrono::duration_cast<std::chrono::seconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    };
};

enum class FeedSource { network, cache, stale_cache };

struct FeedResult {
    IntensitySeries series;
    FeedSource source = FeedSource::network;
    std::filesystem::path cache_file;
};

/// Cache directory: $CARBONDEF_CACHE_DIR, else `configured`, else
/// ./.carbondef-cache.
inline std::filesystem::path resolve_cache_dir(const std::optional<std::filesystem::path>& configured) {
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
    if (configured) return *configured;
    return ".carbondef-cache";
}

namespace detail {

inline std::string file_safe(std::string_view s) {
    std::string out;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '-' || c == '_';
        out += ok ? c : '_';
    }
    return out;
}

inline ordered_json cache_body(const FeedCacheEntry& e, bool with_fetch_time) {
    ordered_json doc;
    doc["region"] = e.region;
    doc["window"] = ordered_json{{"start", e.window_start}, {"end", e.window_end}};
    if (with_fetch_time) doc["fetched_at"] = e.fetched_at;
    doc["payload_digest"] = e.payload_digest;
    doc["entries"] = intensity_to_json(e.series)["entries"];
    return doc;
}

inline std::optional<FeedCacheEntry> read_cache_entry(const std::filesystem::path& file) {
    try {
        json doc = parse_json(read_file(file));
        FeedCacheEntry e;
        e.region = get_string(doc, "region", "");
        const json& w = require_object(member(doc, "window", ""), "/window");
        e.window_start = get_int(w, "start", "/window");
        e.window_end = get_int(w, "end", "/window");
        e.fetched_at = get_int(doc, "fetched_at", "");
        e.payload_digest = get_string(doc, "payload_digest", "");
        json feed = {{"region", e.region}, {"entries", member(doc, "entries", "")}};
        e.series = intensity_from_json(feed);
        return e;
    } catch (const Error&) {
        return std::nullopt;  // unreadable entries are treated as absent
    }
}

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw SchemaError("endpoint '" + url + "' has no scheme", "/intensity/endpoint");
    auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {url, "/"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

}  // namespace detail

/// Every readable cache entry for `region`, best first: newest fetch, then
/// file name.
inline std::vector<std::pair<std::filesystem::path, FeedCacheEntry>> list_cache(
    const std::filesystem::path& dir, const std::string& region) {
    std::vector<std::pair<std::filesystem::path, FeedCacheEntry>> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) return out;
    std::string prefix = detail::file_safe(region) + "-";
    for (const auto& item : std::filesystem::directory_iterator(dir, ec)) {
        const auto name = item.path().filename().string();
        if (!name.starts_with(prefix) || item.path().extension() != ".json") continue;
        if (auto e = detail::read_cache_entry(item.path()); e && e->region == region)
            out.emplace_back(item.path(), std::move(*e));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second.fetched_at != b.second.fetched_at)
            return a.second.fetched_at > b.second.fetched_at;
        return a.first.filename() < b.first.filename();
    });
    return out;
}

/// Stores `entry` atomically and returns the file written.
inline std::filesystem::path write_cache_entry(const std::filesystem::path& dir,
                                               const FeedCacheEntry& entry) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw FileError("cannot create cache directory '" + dir.string() + "'");
    std::string key = sha256_hex(detail::cache_body(entry, false).dump());
    auto file = dir / (detail::file_safe(entry.region) + "-" + key.substr(0, 32) + ".json");
    write_file_atomic(file, dump_canonical(detail::cache_body(entry, true)));
    return file;
}

/// Raw GET against the feed endpoint. Throws NetworkError on transport
/// failure or a non-200 status.
inline std::string http_get_feed(const FeedRequest& req, const FeedClientOptions& opts) {
    auto url = detail::split_url(req.endpoint);
    httplib::Client client(url.origin);
    client.set_connection_timeout(opts.timeout);
    client.set_read_timeout(opts.timeout);
    httplib::Headers headers;
    if (opts.bearer_token) headers.emplace("Authorization", "Bearer " + *opts.bearer_token);
    httplib::Params params{{"region", req.region},
                           {"start", std::to_string(req.start)},
                           {"end", std::to_string(req.end)}};
    auto res = client.Get(url.path, params, headers);
    if (!res)
        throw NetworkError("request to " + req.endpoint + " failed: " +
                           httplib::to_string(res.error()));
    if (res->status != 200)
        throw NetworkError("request to " + req.endpoint + " returned HTTP " +
                           std::to_string(res->status));
    return res->body;
}

/// Intensity for `req`'s window: a fresh covering cache entry if there is
/// one, otherwise the network (writing a new cache entry), otherwise a
/// stale covering entry unless strict freshness is on.
inline FeedResult fetch_intensity(const FeedRequest& req, const FeedClientOptions& opts) {
    if (req.end < req.start) throw IntervalError("feed window end is before start");
    Timestamp now = opts.clock();
    std::optional<std::pair<std::filesystem::path, FeedCacheEntry>> stale;
    for (auto& [file, entry] : list_cache(opts.cache_dir, req.region)) {
        if (!entry.covers(req.start, req.end)) continue;
        if (now - entry.fetched_at <= opts.freshness_s)
            return {std::move(entry.series), FeedSource::cache, file};
        if (!stale) stale.emplace(file, std::move(entry));
    }

    std::string body;
    try {
        body = http_get_feed(req, opts);
    } catch (const NetworkError& e) {
        if (!stale) throw;
        if (opts.strict_freshness)
            throw StaleCacheError(std::string(e.what()) + "; cached data for region '" +
                                  req.region + "' is older than " +
                                  std::to_string(opts.freshness_s) + " s");
        return {std::move(stale->second.series), FeedSource::stale_cache, stale->first};
    }

    FeedCacheEntry entry;
    entry.series = parse_intensity_feed(body);
    if (entry.series.region != req.region)
        throw SchemaError("feed answered for region '" + entry.series.region + "', asked for '" +
                              req.region + "'",
                          "/region");
    entry.region = req.region;
    entry.window_start = req.start;
    entry.window_end = req.end;
    entry.fetched_at = now;
    entry.payload_digest = sha256_hex(body);
    auto file = write_cache_entry(opts.cache_dir, entry);
    return {std::move(entry.series), FeedSource::network, file};
}

}  // namespace carbondef::io

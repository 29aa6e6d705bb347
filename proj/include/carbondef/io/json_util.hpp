#pragma once

// Small checked accessors over nlohmann::json. Every failure names the JSON
// pointer of the offending value, or the byte offset for syntax errors.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "carbondef/errors.hpp"

namespace carbondef::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is the 1-based index of the last byte read
        std::string msg = e.what();
        auto pos = msg.find("] ");
        throw ParseError(pos == std::string::npos ? msg : msg.substr(pos + 2),
                         "byte " + std::to_string(e.byte));
    }
}

inline std::string child(const std::string& where, std::string_view key) {
    return where + "/" + std::string(key);
}

inline std::string child(const std::string& where, std::size_t index) {
    return where + "/" + std::to_string(index);
}

inline const json& require_object(const json& v, const std::string& where) {
    if (!v.is_object()) throw SchemaError("expected an object", where.empty() ? "/" : where);
    return v;
}

inline const json& require_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError("expected an array", where.empty() ? "/" : where);
    return v;
}

inline const json& member(const json& obj, std::string_view key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError("missing field '" + std::string(key) + "'", where.empty() ? "/" : where);
    return *it;
}

inline double get_number(const json& obj, std::string_view key, const std::string& where) {
    const json& v = member(obj, key, where);
    if (!v.is_number()) throw SchemaError("expected a number", child(where, key));
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError("number is not finite", child(where, key));
    return d;
}

inline std::int64_t get_int(const json& obj, std::string_view key, const std::string& where) {
    const json& v = member(obj, key, where);
    if (v.is_number_unsigned()) {
        auto u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT64_MAX))
            throw ParseError("integer out of range", child(where, key));
        return static_cast<std::int64_t>(u);
    }
    if (!v.is_number_integer()) throw SchemaError("expected an integer", child(where, key));
    return v.get<std::int64_t>();
}

inline std::string get_string(const json& obj, std::string_view key, const std::string& where) {
    const json& v = member(obj, key, where);
    if (!v.is_string()) throw SchemaError("expected a string", child(where, key));
    return v.get<std::string>();
}

inline bool get_bool(const json& obj, std::string_view key, const std::string& where) {
    const json& v = member(obj, key, where);
    if (!v.is_boolean()) throw SchemaError("expected a boolean", child(where, key));
    return v.get<bool>();
}

/// Two-space indented, trailing newline.
inline std::string dump_canonical(const ordered_json& v) { return v.dump(2) + "\n"; }

}  // namespace carbondef::io

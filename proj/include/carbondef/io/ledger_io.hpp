#pragma once

// Embodied ledger:
//   {"objects": [{"id", "m_kg", "r_kg", "eol_kg", "lifespan_start", "lifespan_s"}],
//    "records": [{"consumer_id", "object_id",
//                 "profile": [{"start", "end", "fraction"}]}]}

#include <string>
#include <string_view>
#include <vector>

#include "carbondef/embodied_ledger.hpp"
#include "carbondef/io/json_util.hpp"

namespace carbondef::io {

inline Ledger parse_ledger(std::string_view text) {
    json doc = parse_json(text);
    require_object(doc, "");

    std::vector<EmbodiedObject> objects;
    const json& objs = require_array(member(doc, "objects", ""), "/objects");
    for (std::size_t i = 0; i < objs.size(); ++i) {
        std::string loc = child(std::string("/objects"), i);
        const json& o = require_object(objs[i], loc);
        EmbodiedObject obj;
        obj.id = get_string(o, "id", loc);
        obj.m_kg = get_number(o, "m_kg", loc);
        obj.r_kg = get_number(o, "r_kg", loc);
        obj.eol_kg = get_number(o, "eol_kg", loc);
        obj.lifespan_start = get_int(o, "lifespan_start", loc);
        obj.lifespan_s = get_int(o, "lifespan_s", loc);
        objects.push_back(std::move(obj));
    }

    std::vector<ConsumptionRecord> records;
    const json& recs = require_array(member(doc, "records", ""), "/records");
    for (std::size_t i = 0; i < recs.size(); ++i) {
        std::string loc = child(std::string("/records"), i);
        const json& r = require_object(recs[i], loc);
        ConsumptionRecord rec;
        rec.consumer_id = get_string(r, "consumer_id", loc);
        rec.object_id = get_string(r, "object_id", loc);
        std::string profile_at = child(loc, "profile");
        const json& steps = require_array(member(r, "profile", loc), profile_at);
        for (std::size_t k = 0; k < steps.size(); ++k) {
            std::string step_at = child(profile_at, k);
            const json& s = require_object(steps[k], step_at);
            rec.profile.push_back({get_int(s, "start", step_at), get_int(s, "end", step_at),
                                   get_number(s, "fraction", step_at)});
        }
        records.push_back(std::move(rec));
    }
    return Ledger::build(std::move(objects), std::move(records));
}

inline std::string serialize_ledger(const Ledger& ledger) {
    ordered_json objects = ordered_json::array();
    for (const auto& o : ledger.objects()) {
        ordered_json row;
        row["id"] = o.id;
        row["m_kg"] = o.m_kg;
        row["r_kg"] = o.r_kg;
        row["eol_kg"] = o.eol_kg;
        row["lifespan_start"] = o.lifespan_start;
        row["lifespan_s"] = o.lifespan_s;
        objects.push_back(std::move(row));
    }
    ordered_json records = ordered_json::array();
    for (const auto& r : ledger.records()) {
        ordered_json profile = ordered_json::array();
        for (const auto& s : r.profile)
            profile.push_back(ordered_json{{"start", s.start}, {"end", s.end}, {"fraction", s.fraction}});
        ordered_json row;
        row["consumer_id"] = r.consumer_id;
        row["object_id"] = r.object_id;
        row["profile"] = std::move(profile);
        records.push_back(std::move(row));
    }
    ordered_json doc;
    doc["objects"] = std::move(objects);
    doc["records"] = std::move(records);
    return dump_canonical(doc);
}

}  // namespace carbondef::io

#pragma once

// Embodied carbon: lifecycle emissions of physical objects, attributed to
// consumers by the time they used each object and the share they held.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "carbondef/def_model.hpp"
#include "carbondef/errors.hpp"
#include "carbondef/number_format.hpp"

namespace carbondef {

inline constexpr double kOversubscriptionTolerance = 1e-9;

struct EmbodiedObject {
    std::string id;
    double m_kg = 0.0;    // manufacturing
    double r_kg = 0.0;    // repair and maintenance
    double eol_kg = 0.0;  // end of life
    Timestamp lifespan_start = 0;
    std::int64_t lifespan_s = 0;

    Timestamp lifespan_end() const noexcept { return lifespan_start + lifespan_s; }
};

inline void validate_object(const EmbodiedObject& o, const std::string& where = {}) {
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!ok(o.m_kg) || !ok(o.r_kg) || !ok(o.eol_kg))
        throw NegativeInput("object '" + o.id + "': emissions must be >= 0", where);
    if (o.lifespan_s <= 0)
        throw DurationError("object '" + o.id + "': lifespan_s must be > 0", where);
}

/// Share of an object held by one consumer over [start, end).
struct SharingStep {
    Timestamp start = 0;
    Timestamp end = 0;
    double fraction = 1.0;

    std::int64_t duration_s() const noexcept { return end - start; }
};

using SharingProfile = std::vector<SharingStep>;

struct ConsumptionRecord {
    std::string consumer_id;
    std::string object_id;
    SharingProfile profile;
};

/// Seconds covered by the profile, whatever the fraction.
inline std::int64_t consumed_seconds(const SharingProfile& profile) noexcept {
    std::int64_t total = 0;
    for (const auto& s : profile) total += s.duration_s();
    return total;
}

inline void validate_profile(const SharingProfile& profile, const std::string& prefix = {}) {
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto& s = profile[i];
        std::string where = prefix + "/profile/" + std::to_string(i);
        if (s.end <= s.start) throw IntervalError("step end must be after start", where);
        if (!std::isfinite(s.fraction) || s.fraction < 0.0 || s.fraction > 1.0)
            throw FractionError("fraction must lie in [0, 1], got " + format_number(s.fraction),
                                where);
        if (i > 0 && s.start < profile[i - 1].end)
            throw OverlapError("profile steps overlap or are unsorted", where);
    }
}

inline double lifecycle_total(const EmbodiedObject& o) noexcept {
    return o.m_kg + o.r_kg + o.eol_kg;
}

/// Unshared use: lifecycle total scaled by consumed time over lifespan.
inline double attribute_simple(const EmbodiedObject& o, double consumed_s) {
    if (!(consumed_s >= 0.0) || consumed_s > static_cast<double>(o.lifespan_s))
        throw DurationError("consumed time " + format_number(consumed_s) +
                            " s is outside [0, " + format_number(o.lifespan_s) + "]");
    return lifecycle_total(o) * consumed_s / static_cast<double>(o.lifespan_s);
}

/// Throws unless the record's profile is well formed and lies inside the
/// object's lifespan.
inline void check_record(const EmbodiedObject& o, const ConsumptionRecord& record,
                         const std::string& prefix = {}) {
    validate_profile(record.profile, prefix);
    for (std::size_t i = 0; i < record.profile.size(); ++i) {
        const auto& s = record.profile[i];
        if (s.start < o.lifespan_start || s.end > o.lifespan_end())
            throw ProfileOutOfLifespan("step [" + format_number(s.start) + ", " +
                                           format_number(s.end) +
                                           ") lies outside the lifespan of '" + o.id + "'",
                                       prefix + "/profile/" + std::to_string(i));
    }
}

/// Time-varying shared use; each step contributes fraction * step length.
inline double attribute_shared(const EmbodiedObject& o, const ConsumptionRecord& record) {
    check_record(o, record);
    double weighted_s = 0.0;
    for (const auto& s : record.profile) weighted_s += s.fraction * static_cast<double>(s.duration_s());
    return lifecycle_total(o) * weighted_s / static_cast<double>(o.lifespan_s);
}

struct ObjectAttribution {
    std::string object_id;
    double kg_co2e = 0.0;
};

struct ConsumerAttribution {
    std::string consumer_id;
    double total_kg_co2e = 0.0;
    std::vector<ObjectAttribution> by_object;  // sorted by object id
};

/// Objects plus who used them. Built once through `build`, read-only after.
class Ledger {
public:
    Ledger() = default;

    /// Validates objects and records, then rejects any instant at which the
    /// fractions claimed on one object add up to more than one.
    static Ledger build(std::vector<EmbodiedObject> objects,
                        std::vector<ConsumptionRecord> records) {
        Ledger ledger;
        for (std::size_t i = 0; i < objects.size(); ++i) {
            const auto& o = objects[i];
            validate_object(o, "/objects/" + std::to_string(i));
            if (ledger.index_.contains(o.id))
                throw ReferenceError("duplicate object id '" + o.id + "'",
                                     "/objects/" + std::to_string(i));
            ledger.index_.emplace(o.id, i);
        }
        ledger.objects_ = std::move(objects);

        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            std::string where = "/records/" + std::to_string(i);
            auto it = ledger.index_.find(r.object_id);
            if (it == ledger.index_.end())
                throw ReferenceError("record references unknown object '" + r.object_id + "'",
                                     where);
            check_record(ledger.objects_[it->second], r, where);
        }
        ledger.records_ = std::move(records);
        ledger.check_subscription();
        return ledger;
    }

    const std::vector<EmbodiedObject>& objects() const noexcept { return objects_; }
    const std::vector<ConsumptionRecord>& records() const noexcept { return records_; }

    const EmbodiedObject* find(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : &objects_[it->second];
    }

    const EmbodiedObject& object(const std::string& id) const {
        const auto* o = find(id);
        if (!o) throw UnknownObject("no object '" + id + "' in ledger");
        return *o;
    }

    /// Consumer ids in sorted order.
    std::vector<std::string> consumers() const {
        std::vector<std::string> ids;
        for (const auto& r : records_) ids.push_back(r.consumer_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    }

private:
    void check_subscription() const {
        // Sweep every object's boundaries; the running sum of fractions
        // between two consecutive boundaries is the claimed share.
        std::map<std::string, std::vector<std::pair<Timestamp, double>>> events;
        for (const auto& r : records_)
            for (const auto& s : r.profile) {
                events[r.object_id].emplace_back(s.start, s.fraction);
                events[r.object_id].emplace_back(s.end, -s.fraction);
            }
        for (auto& [id, ev] : events) {
            std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
                return a.first < b.first;
            });
            double claimed = 0.0;
            for (std::size_t i = 0; i < ev.size();) {
                Timestamp t = ev[i].first;
                for (; i < ev.size() && ev[i].first == t; ++i) claimed += ev[i].second;
                if (claimed > 1.0 + kOversubscriptionTolerance)
                    throw OversubscriptionError("object '" + id + "' is claimed at " +
                                                    format_number(claimed) + " of capacity",
                                                "t=" + format_number(t));
            }
        }
    }

    std::vector<EmbodiedObject> objects_;
    std::vector<ConsumptionRecord> records_;
    std::map<std::string, std::size_t> index_;
};

/// Sum of a consumer's attributions. Unknown consumers get zero.
inline ConsumerAttribution consumer_embodied(const Ledger& ledger, const std::string& consumer_id) {
    std::map<std::string, double> per_object;
    for (const auto& r : ledger.records())
        if (r.consumer_id == consumer_id)
            per_object[r.object_id] += attribute_shared(ledger.object(r.object_id), r);

    ConsumerAttribution out;
    out.consumer_id = consumer_id;
    for (const auto& [id, kg] : per_object) {
        out.by_object.push_back({id, kg});
        out.total_kg_co2e += kg;
    }
    return out;
}

/// Part of an object's lifecycle emissions that no consumer claimed.
inline double idle_residual(const Ledger& ledger, const std::string& object_id) {
    const auto& o = ledger.object(object_id);
    double attributed = 0.0;
    for (const auto& r : ledger.records())
        if (r.object_id == object_id) attributed += attribute_shared(o, r);
    return lifecycle_total(o) - attributed;
}

}  // namespace carbondef

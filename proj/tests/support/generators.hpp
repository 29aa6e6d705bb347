#pragma once

// Seeded random inputs for property tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "carbondef/def_model.hpp"
#include "carbondef/embodied_ledger.hpp"
#include "carbondef/grid_integration.hpp"

namespace carbondef::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline ServerSpec random_spec(Rng& rng, double idle_watts = 0.0) {
    ServerSpec s;
    s.tdp_watts = uniform(rng, 5.0, 400.0);
    s.n_cpu = static_cast<int>(uniform_int(rng, 1, 8));
    double w[4];
    for (double& x : w) x = uniform(rng, 0.01, 1.0);
    double total = w[0] + w[1] + w[2] + w[3];
    s.alpha.cpu = w[0] / total;
    s.alpha.mem = w[1] / total;
    s.alpha.io = w[2] / total;
    s.alpha.net = std::max(0.0, 1.0 - s.alpha.cpu - s.alpha.mem - s.alpha.io);
    s.u_max.cpu = static_cast<double>(uniform_int(rng, 1, 128));
    s.u_max.mem = uniform(rng, 1e9, 1e12);
    s.u_max.io = uniform(rng, 1e6, 1e10);
    s.u_max.net = uniform(rng, 1e6, 1e10);
    s.idle_watts = idle_watts;
    return validate_spec(s);
}

inline UsageSample random_usage(Rng& rng, const ServerSpec& spec) {
    UsageSample u;
    u.start = 1'700'000'000 + uniform_int(rng, 0, 1'000'000);
    u.duration_s = static_cast<double>(uniform_int(rng, 1, 3600));
    for (Component c : kComponents) u[c] = uniform(rng, 0.0, spec.u_max[c]);
    return u;
}

inline UsageSample full_usage(const ServerSpec& spec, double duration_s = 1.0) {
    UsageSample u;
    u.start = 0;
    u.duration_s = duration_s;
    for (Component c : kComponents) u[c] = spec.u_max[c];
    return u;
}

/// Whole-second energy intervals starting at `origin`, with random gaps.
inline EnergySeries random_energy_series(Rng& rng, Timestamp origin, int max_entries) {
    EnergySeries s;
    Timestamp t = origin + uniform_int(rng, 0, 300);
    int n = static_cast<int>(uniform_int(rng, 0, max_entries));
    for (int i = 0; i < n; ++i) {
        EnergyEntry e;
        e.start = t;
        e.duration_s = static_cast<double>(uniform_int(rng, 1, 900));
        e.joules.total_j = uniform(rng, 0.0, 5e6);
        e.joules.cpu_j = e.joules.total_j;
        s.entries.push_back(e);
        t += static_cast<Timestamp>(e.duration_s) + (uniform_int(rng, 0, 3) == 0 ? uniform_int(rng, 1, 200) : 0);
    }
    return s;
}

/// Step intensity over [from, to), optionally with holes.
inline IntensitySeries random_intensity(Rng& rng, Timestamp from, Timestamp to, bool gaps) {
    IntensitySeries s;
    s.region = "TEST";
    Timestamp t = from;
    while (t < to) {
        Timestamp len = uniform_int(rng, 1, 1800);
        if (!gaps || uniform_int(rng, 0, 4) != 0)
            s.entries.push_back({t, t + len, uniform(rng, 0.0, 1.2)});
        t += len;
    }
    return s;
}

inline Timestamp series_end(const EnergySeries& s, Timestamp fallback) {
    if (s.empty()) return fallback;
    const auto& last = s.entries.back();
    return last.start + static_cast<Timestamp>(last.duration_s);
}

/// Random ledger whose per-instant fractions never exceed one: every
/// object's lifespan is cut into slots and each slot's capacity is split
/// among a few consumers.
inline Ledger random_ledger(Rng& rng) {
    std::vector<EmbodiedObject> objects;
    std::vector<ConsumptionRecord> records;
    int n_objects = static_cast<int>(uniform_int(rng, 1, 5));
    for (int i = 0; i < n_objects; ++i) {
        EmbodiedObject o;
        o.id = "obj-" + std::to_string(i);
        o.m_kg = uniform(rng, 0.0, 5000.0);
        o.r_kg = uniform(rng, 0.0, 500.0);
        o.eol_kg = uniform(rng, 0.0, 200.0);
        o.lifespan_start = 1'600'000'000 + uniform_int(rng, 0, 100'000);
        o.lifespan_s = uniform_int(rng, 1000, 400'000'000);
        objects.push_back(o);

        int n_consumers = static_cast<int>(uniform_int(rng, 0, 4));
        std::vector<ConsumptionRecord> mine(n_consumers);
        for (int c = 0; c < n_consumers; ++c) {
            mine[c].consumer_id = "c" + std::to_string(uniform_int(rng, 0, 5));
            mine[c].object_id = o.id;
        }
        Timestamp t = o.lifespan_start;
        while (t < o.lifespan_end() && n_consumers > 0) {
            Timestamp len = std::min<Timestamp>(o.lifespan_end() - t,
                                                uniform_int(rng, 1, o.lifespan_s / 3 + 1));
            double left = 1.0;
            for (int c = 0; c < n_consumers; ++c) {
                double f = uniform(rng, 0.0, left);
                if (uniform_int(rng, 0, 3) != 0) {
                    mine[c].profile.push_back({t, t + len, f});
                    left -= f;
                }
            }
            t += len + (uniform_int(rng, 0, 2) == 0 ? std::min<Timestamp>(o.lifespan_end() - t - len, uniform_int(rng, 0, o.lifespan_s / 5 + 1)) : 0);
        }
        for (auto& r : mine) records.push_back(std::move(r));
    }
    return Ledger::build(std::move(objects), std::move(records));
}

}  // namespace carbondef::testing

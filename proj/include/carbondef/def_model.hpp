#pragma once

// Server energy model: turns observed component usage into power and
// energy. Full-load CPU power is anchored at TDP * N_CPU; memory, storage
// and network are charged relative to the CPU through fixed allocation
// factors, and every component scales linearly with its usage.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "carbondef/errors.hpp"
#include "carbondef/number_format.hpp"

namespace carbondef {

/// UTC epoch seconds.
using Timestamp = std::int64_t;

enum class Component { cpu, mem, io, net };

inline constexpr std::array<Component, 4> kComponents = {Component::cpu, Component::mem,
                                                         Component::io, Component::net};

inline constexpr std::string_view to_string(Component c) noexcept {
    switch (c) {
        case Component::cpu: return "cpu";
        case Component::mem: return "mem";
        case Component::io: return "io";
        case Component::net: return "net";
    }
    return "?";
}

/// Share of full-load server energy attributed to each component.
struct Allocation {
    double cpu = 1.0;
    double mem = 0.0;
    double io = 0.0;
    double net = 0.0;

    double operator[](Component c) const noexcept {
        switch (c) {
            case Component::cpu: return cpu;
            case Component::mem: return mem;
            case Component::io: return io;
            case Component::net: return net;
        }
        return 0.0;
    }
};

/// Maximum usage per component: cores for cpu, bytes (or bytes per
/// interval) for the rest.
struct UsageLimits {
    double cpu = 1.0;
    double mem = 1.0;
    double io = 1.0;
    double net = 1.0;

    double operator[](Component c) const noexcept {
        switch (c) {
            case Component::cpu: return cpu;
            case Component::mem: return mem;
            case Component::io: return io;
            case Component::net: return net;
        }
        return 0.0;
    }
};

// Declared meaning of the byte-valued limits. Only the ratio usage/limit
// enters the model, so these are carried along and never converted.
enum class UsageUnit { bytes, bytes_per_interval };

inline constexpr std::string_view to_string(UsageUnit u) noexcept {
    return u == UsageUnit::bytes ? "bytes" : "bytes_per_interval";
}

struct UsageUnits {
    UsageUnit mem = UsageUnit::bytes;
    UsageUnit io = UsageUnit::bytes;
    UsageUnit net = UsageUnit::bytes;
};

struct ServerSpec {
    double tdp_watts = 0.0;  // per CPU, at full load
    int n_cpu = 1;
    Allocation alpha;
    UsageLimits u_max;
    double idle_watts = 0.0;  // baseline, charged whatever the usage
    UsageUnits units;
};

inline constexpr double kAllocationTolerance = 1e-9;

/// Checks every ServerSpec invariant and returns the spec unchanged.
/// Throws AllocationError for a bad allocation vector and SpecError for
/// anything else.
inline ServerSpec validate_spec(const ServerSpec& spec) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(spec.tdp_watts)) throw SpecError("tdp_watts must be > 0");
    if (spec.n_cpu < 1) throw SpecError("n_cpu must be >= 1");
    for (Component c : kComponents) {
        if (!positive(spec.u_max[c]))
            throw SpecError("u_max." + std::string(to_string(c)) + " must be > 0");
    }
    if (!std::isfinite(spec.idle_watts) || spec.idle_watts < 0.0)
        throw SpecError("idle_watts must be >= 0");

    for (Component c : kComponents) {
        double a = spec.alpha[c];
        if (!std::isfinite(a) || a < 0.0)
            throw AllocationError("alpha." + std::string(to_string(c)) + " must be >= 0");
    }
    if (!(spec.alpha.cpu > 0.0)) throw AllocationError("alpha.cpu must be > 0");
    double sum = spec.alpha.cpu + spec.alpha.mem + spec.alpha.io + spec.alpha.net;
    if (std::abs(sum - 1.0) > kAllocationTolerance)
        throw AllocationError("alpha entries sum to " + format_number(sum) + ", expected 1");
    return spec;
}

/// Resource usage averaged over [start, start + duration_s).
struct UsageSample {
    Timestamp start = 0;
    double duration_s = 0.0;
    double u_cpu = 0.0;  // cores
    double u_mem = 0.0;  // bytes
    double u_io = 0.0;   // bytes
    double u_net = 0.0;  // bytes

    double operator[](Component c) const noexcept {
        switch (c) {
            case Component::cpu: return u_cpu;
            case Component::mem: return u_mem;
            case Component::io: return u_io;
            case Component::net: return u_net;
        }
        return 0.0;
    }

    double& operator[](Component c) noexcept {
        switch (c) {
            case Component::cpu: return u_cpu;
            case Component::mem: return u_mem;
            case Component::io: return u_io;
            case Component::net: break;
        }
        return u_net;
    }
};

/// What to do with usage above the spec's maximum.
enum class UsageBounds { reject, clamp };

struct PowerBreakdown {
    double cpu_w = 0.0;
    double mem_w = 0.0;
    double io_w = 0.0;
    double net_w = 0.0;
    double idle_w = 0.0;
    double total_w = 0.0;
};

namespace detail {

inline void check_sample_shape(const UsageSample& sample) {
    if (!std::isfinite(sample.duration_s) || sample.duration_s <= 0.0)
        throw SampleError("duration_s must be > 0");
    for (Component c : kComponents) {
        double u = sample[c];
        if (!std::isfinite(u) || u < 0.0)
            throw UsageOutOfRange("usage " + std::string(to_string(c)) + " must be >= 0");
    }
}

// Full-load power of one component, TDP*N_CPU scaled by alpha_x/alpha_cpu.
inline double full_load_watts(const ServerSpec& spec, Component c) noexcept {
    double cpu_max = spec.tdp_watts * spec.n_cpu;
    if (c == Component::cpu) return cpu_max;
    return (spec.alpha[c] / spec.alpha.cpu) * spec.tdp_watts * spec.n_cpu;
}

}  // namespace detail

/// True when any usage value of `sample` is above the spec's maximum.
inline bool exceeds_limits(const ServerSpec& spec, const UsageSample& sample) noexcept {
    for (Component c : kComponents)
        if (sample[c] > spec.u_max[c]) return true;
    return false;
}

/// Instantaneous power drawn for `sample`, split by source.
inline PowerBreakdown component_power(const ServerSpec& spec, const UsageSample& sample,
                                      UsageBounds bounds = UsageBounds::reject) {
    detail::check_sample_shape(sample);
    std::array<double, 4> watts{};
    for (Component c : kComponents) {
        double u = sample[c];
        double limit = spec.u_max[c];
        if (u > limit) {
            if (bounds == UsageBounds::reject)
                throw UsageOutOfRange("usage " + std::string(to_string(c)) + " = " +
                                      format_number(u) + " exceeds u_max " +
                                      format_number(limit));
            u = limit;
        }
        watts[static_cast<std::size_t>(c)] = (u / limit) * detail::full_load_watts(spec, c);
    }
    PowerBreakdown p;
    p.cpu_w = watts[0];
    p.mem_w = watts[1];
    p.io_w = watts[2];
    p.net_w = watts[3];
    p.idle_w = spec.idle_watts;
    p.total_w = p.cpu_w + p.mem_w + p.io_w + p.net_w + p.idle_w;
    return p;
}

/// dP/dU for one component: watts per core (cpu) or per byte.
inline double marginal_power(const ServerSpec& spec, Component c) noexcept {
    return detail::full_load_watts(spec, c) / spec.u_max[c];
}

/// Joules per source over one interval.
struct ComponentEnergy {
    double cpu_j = 0.0;
    double mem_j = 0.0;
    double io_j = 0.0;
    double net_j = 0.0;
    double idle_j = 0.0;
    double total_j = 0.0;

    ComponentEnergy& operator+=(const ComponentEnergy& o) noexcept {
        cpu_j += o.cpu_j;
        mem_j += o.mem_j;
        io_j += o.io_j;
        net_j += o.net_j;
        idle_j += o.idle_j;
        total_j += o.total_j;
        return *this;
    }
};

struct EnergyEntry {
    Timestamp start = 0;
    double duration_s = 0.0;
    ComponentEnergy joules;
    bool clamped = false;  // usage was lowered to u_max before evaluation
};

/// Ordered, non-overlapping energy intervals, each half-open.
struct EnergySeries {
    std::vector<EnergyEntry> entries;

    bool empty() const noexcept { return entries.empty(); }

    ComponentEnergy totals() const noexcept {
        ComponentEnergy sum;
        for (const auto& e : entries) sum += e.joules;
        return sum;
    }

    double total_joules() const noexcept { return totals().total_j; }
};

/// Energy drawn over the sample interval, holding usage constant within it.
inline EnergyEntry energy_over_interval(const ServerSpec& spec, const UsageSample& sample,
                                        UsageBounds bounds = UsageBounds::reject) {
    PowerBreakdown p = component_power(spec, sample, bounds);
    EnergyEntry e;
    e.start = sample.start;
    e.duration_s = sample.duration_s;
    e.clamped = exceeds_limits(spec, sample);
    e.joules.cpu_j = p.cpu_w * sample.duration_s;
    e.joules.mem_j = p.mem_w * sample.duration_s;
    e.joules.io_j = p.io_w * sample.duration_s;
    e.joules.net_j = p.net_w * sample.duration_s;
    e.joules.idle_j = p.idle_w * sample.duration_s;
    e.joules.total_j =
        e.joules.cpu_j + e.joules.mem_j + e.joules.io_j + e.joules.net_j + e.joules.idle_j;
    return e;
}

namespace detail {

// true when [a_start, a_start + a_dur) ends at or before b_start
inline bool ends_before(Timestamp a_start, double a_dur, Timestamp b_start) noexcept {
    return static_cast<double>(b_start - a_start) >= a_dur;
}

}  // namespace detail

/// Throws TraceOrderError unless samples are sorted and disjoint.
inline void check_trace_order(std::span<const UsageSample> samples) {
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const auto& prev = samples[i - 1];
        const auto& cur = samples[i];
        if (cur.start < prev.start)
            throw TraceOrderError("samples are not sorted by start", "sample " + std::to_string(i));
        if (!detail::ends_before(prev.start, prev.duration_s, cur.start))
            throw TraceOrderError("sample overlaps the previous one",
                                  "sample " + std::to_string(i));
    }
}

inline EnergySeries trace_to_energy_series(const ServerSpec& spec,
                                           std::span<const UsageSample> samples,
                                           UsageBounds bounds = UsageBounds::reject) {
    check_trace_order(samples);
    EnergySeries series;
    series.entries.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        try {
            series.entries.push_back(energy_over_interval(spec, samples[i], bounds));
        } catch (const UsageOutOfRange& e) {
            throw UsageOutOfRange(e.what(), "sample " + std::to_string(i));
        } catch (const SampleError& e) {
            throw SampleError(e.what(), "sample " + std::to_string(i));
        }
    }
    return series;
}

}  // namespace carbondef

// One PASS/FAIL line per acceptance criterion. Exit status is non-zero if
// any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "carbondef/def_model.hpp"
#include "carbondef/embodied_ledger.hpp"
#include "carbondef/grid_integration.hpp"
#include "carbondef/io/feed_client.hpp"
#include "support/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/run_cli.hpp"
#include "support/stub_feed.hpp"

namespace cd = carbondef;
namespace ct = carbondef::testing;
namespace io = carbondef::io;
namespace fs = std::filesystem;

namespace {

double rel_err(double a, double b) {
    double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

using Check = std::function<Outcome()>;

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;  // 0 = none
    Check run;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

Outcome full_load_anchor() {
    Outcome o;
    ct::Rng rng(1001);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto spec = ct::random_spec(rng, 0.0);
        double total = cd::component_power(spec, ct::full_usage(spec)).total_w;
        worst = std::max(worst, rel_err(total, spec.tdp_watts * spec.n_cpu / spec.alpha.cpu));
    }
    if (worst > 1e-9) o.fail("max relative error " + fmt(worst));
    o.detail = o.pass ? "100 specs, max rel err " + fmt(worst) : o.detail;
    return o;
}

Outcome linearity() {
    Outcome o;
    ct::Rng rng(1002);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        auto spec = ct::random_spec(rng, 0.0);
        auto u = ct::random_usage(rng, spec);
        double lambda = ct::uniform(rng, 0.0, 1.0);
        auto scaled = u;
        for (auto c : cd::kComponents) scaled[c] = lambda * u[c];
        auto p = cd::component_power(spec, u);
        auto q = cd::component_power(spec, scaled);
        for (auto [a, b] : {std::pair{q.cpu_w, p.cpu_w}, {q.mem_w, p.mem_w}, {q.io_w, p.io_w},
                            {q.net_w, p.net_w}, {q.total_w, p.total_w}})
            worst = std::max(worst, rel_err(a, lambda * b));
    }
    if (worst > 1e-12) o.fail("max relative error " + fmt(worst));
    o.detail = o.pass ? "1000 triples, max rel err " + fmt(worst) : o.detail;
    return o;
}

Outcome marginal_consistency() {
    Outcome o;
    ct::Rng rng(1003);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto spec = ct::random_spec(rng, ct::uniform(rng, 0.0, 50.0));
        auto c = cd::kComponents[static_cast<std::size_t>(ct::uniform_int(rng, 0, 3))];
        double step = 1e-3 * spec.u_max[c];
        auto u = ct::random_usage(rng, spec);
        u[c] = ct::uniform(rng, step, spec.u_max[c] - step);
        auto hi = u, lo = u;
        hi[c] += step;
        lo[c] -= step;
        double fd = (cd::component_power(spec, hi).total_w - cd::component_power(spec, lo).total_w) /
                    (hi[c] - lo[c]);
        worst = std::max(worst, rel_err(fd, cd::marginal_power(spec, c)));
    }
    if (worst > 1e-9) o.fail("max relative error " + fmt(worst));
    o.detail = o.pass ? "100 points, max rel err " + fmt(worst) : o.detail;
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    ct::Rng rng(1004);
    constexpr cd::Timestamp t0 = 1'700'000'000;
    double worst = 0.0;
    int cases = 0;
    for (int i = 0; i < 1000; ++i) {
        bool gaps = i % 2 == 1;
        auto energy = ct::random_energy_series(rng, t0, 40);
        auto intensity = ct::random_intensity(rng, t0 - 200, ct::series_end(energy, t0) + 200, gaps);
        double pue = ct::uniform(rng, 1.0, 2.0);
        auto policy = gaps ? cd::CoveragePolicy::skip_uncovered : cd::CoveragePolicy::strict;
        double got = cd::operational_emissions(energy, intensity, cd::PueFactor(pue), policy).total_kg_co2e;
        worst = std::max(worst, rel_err(got, ct::oracle_emissions(energy, intensity, pue)));
        ++cases;
    }
    if (worst > 1e-9) o.fail("max relative error " + fmt(worst));
    o.detail = o.pass ? std::to_string(cases) + " pairs, max rel err " + fmt(worst) : o.detail;
    return o;
}

Outcome constant_collapse() {
    Outcome o;
    ct::Rng rng(1005);
    constexpr cd::Timestamp t0 = 1'700'000'000;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto energy = ct::random_energy_series(rng, t0, 30);
        double gm = ct::uniform(rng, 0.0, 1.2);
        double pue = ct::uniform(rng, 1.0, 2.0);
        cd::IntensitySeries flat{"FLAT", {{t0 - 1, ct::series_end(energy, t0) + 1, gm}}};
        double got = cd::operational_emissions(energy, flat, cd::PueFactor(pue),
                                               cd::CoveragePolicy::strict).total_kg_co2e;
        worst = std::max(worst, rel_err(got, pue * gm * energy.total_joules() / cd::kJoulesPerKwh));
    }
    if (worst > 1e-12) o.fail("max relative error " + fmt(worst));
    o.detail = o.pass ? "100 cases, max rel err " + fmt(worst) : o.detail;
    return o;
}

Outcome embodied_conservation() {
    Outcome o;
    ct::Rng rng(1006);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        auto ledger = ct::random_ledger(rng);
        double lifecycle = 0.0, charged = 0.0, idle = 0.0;
        for (const auto& obj : ledger.objects()) {
            lifecycle += cd::lifecycle_total(obj);
            idle += cd::idle_residual(ledger, obj.id);
        }
        for (const auto& c : ledger.consumers()) charged += cd::consumer_embodied(ledger, c).total_kg_co2e;
        worst = std::max(worst, rel_err(charged + idle, lifecycle));
    }
    if (worst > 1e-9) o.fail("conservation max relative error " + fmt(worst));

    // fraction-1 profiles against the unshared formula, compared exactly
    for (int i = 0; i < 500 && o.pass; ++i) {
        cd::EmbodiedObject obj{"o", ct::uniform(rng, 0, 5000), ct::uniform(rng, 0, 500),
                               ct::uniform(rng, 0, 200), 1'600'000'000,
                               ct::uniform_int(rng, 10, 400'000'000)};
        cd::SharingProfile profile;
        cd::Timestamp t = obj.lifespan_start;
        while (t < obj.lifespan_end()) {
            cd::Timestamp len = std::min<cd::Timestamp>(obj.lifespan_end() - t,
                                                         ct::uniform_int(rng, 1, obj.lifespan_s / 2 + 1));
            if (ct::uniform_int(rng, 0, 1) == 0) profile.push_back({t, t + len, 1.0});
            t += len;
        }
        double shared = cd::attribute_shared(obj, {"c", "o", profile});
        double simple = cd::attribute_simple(obj, static_cast<double>(cd::consumed_seconds(profile)));
        if (shared != simple) o.fail("fraction-1 profile gives " + fmt(shared) + ", expected " + fmt(simple));
    }
    o.detail = o.pass ? "500 ledgers, max rel err " + fmt(worst) + "; fraction-1 profiles exact" : o.detail;
    return o;
}

Outcome end_to_end(const fs::path& scratch) {
    Outcome o;
    const std::string args = "report --config config.json --trace trace_full_load.csv --ledger ledger.json";
    auto a = ct::run_cli(args, scratch);
    auto b = ct::run_cli(args, scratch);
    if (a.exit_code != 0) {
        o.fail("exit " + std::to_string(a.exit_code) + ": " + a.err);
        return o;
    }
    if (a.out != b.out) o.fail("two runs differ");
    auto doc = io::parse_json(a.out);
    double op = doc["sci"]["operational_kg_co2e"].get<double>();
    double emb = doc["sci"]["embodied_kg_co2e"].get<double>();
    double sci = doc["sci"]["sci_kg_per_unit"].get<double>();
    if (rel_err(op, 0.45) > 1e-9) o.fail("operational " + fmt(op));
    if (rel_err(emb, 100.0) > 1e-9) o.fail("embodied " + fmt(emb));
    if (doc["sci"]["functional_unit"]["count"].get<double>() != 1000.0) o.fail("R is not 1000");
    if (rel_err(sci, 0.10045) > 1e-9) o.fail("SCI " + fmt(sci));
    if (o.pass) o.detail = "SCI " + cd::format_number(sci) + " kg/unit, runs byte-identical";
    return o;
}

Outcome ingestion_corpus() {
    Outcome o;
    auto corpus = ct::load_corpus();
    if (corpus.size() < 20) o.fail("only " + std::to_string(corpus.size()) + " malformed fixtures");
    for (const auto& c : corpus) {
        auto r = ct::run_corpus_case(c);
        if (!r.kind)
            o.fail(c.file + " parsed without error");
        else if (*r.kind != c.error)
            o.fail(c.file + " raised " + *r.kind + ", expected " + c.error);
        else if (r.location.empty() || r.location != c.location)
            o.fail(c.file + " location '" + r.location + "', expected '" + c.location + "'");
    }
    auto trips = ct::canonical_roundtrips();
    for (const auto& t : trips)
        if (!t.identical) o.fail(t.file + " does not round-trip");
    if (o.pass)
        o.detail = std::to_string(corpus.size()) + " malformed fixtures, " + std::to_string(trips.size()) +
                   " canonical round-trips";
    return o;
}

Outcome feed_client(const fs::path& scratch) {
    Outcome o;
    ct::StubFeed feed(ct::read_fixture("intensity_split.json"));
    cd::Timestamp now = 1'700'100'000;
    io::FeedClientOptions opts;
    opts.cache_dir = scratch / "feed-cache";
    opts.freshness_s = 1800;
    opts.timeout = std::chrono::seconds(2);
    opts.clock = [&] { return now; };
    io::FeedRequest req{feed.endpoint(), "TEST-GRID", 1'700'000'000, 1'700'003'600};

    auto first = io::fetch_intensity(req, opts);
    if (first.source != io::FeedSource::network) o.fail("first fetch did not use the network");
    if (!fs::exists(first.cache_file)) o.fail("no cache file after first fetch");
    now += opts.freshness_s - 1;
    auto second = io::fetch_intensity(req, opts);
    if (feed.requests() != 1)
        o.fail(std::to_string(feed.requests()) + " network calls within the freshness window");
    if (second.source != io::FeedSource::cache) o.fail("second fetch not served from cache");
    if (second.series.entries.size() != first.series.entries.size()) o.fail("cached series differs");

    // concurrent writers, one reader: every visible cache file is complete
    int partial = 0;
    std::atomic<bool> done{false};
    std::thread reader([&] {
        while (!done) {
            std::error_code ec;
            for (const auto& e : fs::directory_iterator(opts.cache_dir, ec)) {
                if (e.path().extension() != ".json") continue;
                try {
                    io::parse_json(io::read_file(e.path()));
                } catch (const cd::ParseError&) {
                    ++partial;
                } catch (const cd::FileError&) {
                }
            }
        }
    });
    std::vector<std::thread> writers;
    for (int w = 0; w < 4; ++w)
        writers.emplace_back([&, w] {
            for (int i = 0; i < 10; ++i) {
                auto r = req;
                r.start = 1'690'000'000 + 100 * (w * 10 + i);
                r.end = r.start + 50;
                io::fetch_intensity(r, opts);
            }
        });
    for (auto& t : writers) t.join();
    done = true;
    reader.join();
    if (partial) o.fail(std::to_string(partial) + " partial cache files observed");
    for (const auto& e : fs::directory_iterator(opts.cache_dir))
        if (e.path().extension() != ".json") o.fail("leftover temporary file " + e.path().string());
    if (o.pass) o.detail = "1 network call for 2 fetches in window; 40 concurrent writes, no partial files";
    return o;
}

}  // namespace

int main() {
    ct::TempDir scratch;
    std::vector<Criterion> criteria = {
        {1, "full-load anchor", 1.0, full_load_anchor},
        {2, "linearity", 1.0, linearity},
        {3, "marginal consistency", 0.0, marginal_consistency},
        {4, "per-second oracle equivalence", 30.0, oracle_equivalence},
        {5, "constant-intensity collapse", 0.0, constant_collapse},
        {6, "embodied conservation", 0.0, embodied_conservation},
        {7, "end-to-end fixture", 0.0, [&] { return end_to_end(scratch.path()); }},
        {8, "ingestion corpus", 0.0, ingestion_corpus},
        {9, "feed client cache", 0.0, [&] { return feed_client(scratch.path()); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        auto begin = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
        if (c.time_limit_s > 0.0 && elapsed >= c.time_limit_s)
            o.fail("took " + fmt(elapsed) + " s, limit " + fmt(c.time_limit_s) + " s");
        failures += o.pass ? 0 : 1;
        std::printf("%s %d %s: %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    elapsed);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}

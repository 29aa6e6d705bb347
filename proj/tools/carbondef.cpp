// carbondef: estimate energy, operational and embodied emissions, and the
// per-unit carbon score of a workload from its usage trace.
//
// Exit codes: 0 success, 2 invalid input, 3 I/O or network failure.

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "carbondef/commands.hpp"
#include "carbondef/errors.hpp"
#include "carbondef/io/files.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

int exit_code(const carbondef::Error& e) {
    return e.category() == carbondef::ErrorCategory::io ? kExitIo : kExitValidation;
}

int report_error(const carbondef::Error& e, const std::string& context = {}) {
    std::cerr << "error: " << (context.empty() ? "" : context + ": ") << e.kind() << ": "
              << e.what() << "\n";
    return exit_code(e);
}

}  // namespace

int main(int argc, char** argv) {
    namespace cmd = carbondef::commands;

    CLI::App app{"Carbon footprint estimation for software workloads"};
    app.require_subcommand(1);
    app.set_version_flag("--version", carbondef::report::kToolVersion);

    cmd::Options opts;
    std::string config, trace, ledger, consumer, format, out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", out, "Write the report here instead of stdout");
    };
    auto add_pipeline = [&](CLI::App* sub) {
        sub->add_option("--config", config, "Run configuration (JSON)")->required();
        sub->add_option("--trace", trace, "Usage trace (.csv or .json)")->required();
        sub->add_flag("--strict-coverage", opts.strict_coverage,
                      "Fail when energy falls outside intensity coverage");
        sub->add_flag("--clamp-usage", opts.clamp_usage, "Clamp usage above u_max instead of failing");
        add_common(sub);
    };

    auto* estimate = app.add_subcommand("estimate", "Energy per interval and component");
    add_pipeline(estimate);
    auto* emissions = app.add_subcommand("emissions", "Operational emissions");
    add_pipeline(emissions);
    auto* embodied = app.add_subcommand("embodied", "Embodied emissions from a ledger");
    embodied->add_option("--ledger", ledger, "Embodied ledger (JSON)")->required();
    embodied->add_option("--consumer", consumer, "Only this consumer");
    add_common(embodied);
    auto* full = app.add_subcommand("report", "Energy, operational, embodied and SCI");
    add_pipeline(full);
    full->add_option("--ledger", ledger, "Embodied ledger (JSON)");
    full->add_option("--consumer", consumer, "Consumer charged with embodied emissions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (!config.empty()) opts.config = config;
    if (!trace.empty()) opts.trace = trace;
    if (!ledger.empty()) opts.ledger = ledger;
    if (!consumer.empty()) opts.consumer = consumer;
    if (format == "json") opts.format = carbondef::io::OutputFormat::json;
    if (format == "csv") opts.format = carbondef::io::OutputFormat::csv;

    try {
        cmd::Output result;
        if (*estimate)
            result = cmd::run_estimate(opts);
        else if (*emissions)
            result = cmd::run_emissions(opts);
        else if (*embodied)
            result = cmd::run_embodied(opts);
        else
            result = cmd::run_report(opts);

        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        if (out.empty())
            std::cout << result.body;
        else
            carbondef::io::write_file_atomic(out, result.body);
        return kExitOk;
    } catch (const cmd::InputFailure& f) {
        try {
            std::rethrow_if_nested(f);
        } catch (const carbondef::Error& e) {
            return report_error(e, f.what());
        }
        std::cerr << "error: " << f.what() << "\n";
        return kExitValidation;
    } catch (const carbondef::Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

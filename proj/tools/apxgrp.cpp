#include <CLI11.hpp>
#include <iostream>

#include "apxgrp/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string formats;
    std::string cache;
    std::vector<std::string> flags;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool seed_set = false;
    bool threads_set = false;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "run configuration file");
    sub->add_option("--out", opts.out_dir, "output directory (overrides config)");
    sub->add_option("--format", opts.formats, "output formats: csv,json");
    sub->add_option("--cache", opts.cache, "set cache on/off");
    sub->add_option("--flag", opts.flags, "command flag key=value (repeatable)")->expected(-1);
    sub->add_option("--seed", opts.seed, "run seed")->each([&opts](const std::string&) { opts.seed_set = true; });
    sub->add_option("--threads", opts.threads, "worker threads")->each([&opts](const std::string&) {
        opts.threads_set = true;
    });
}

int run_command(const std::string& name, const CommonOpts& opts) {
    apxgrp::RunConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = apxgrp::RunConfig::parse_file(opts.config_path);
    } else if (name == "corpus-run") {
        cfg.text = "command {\n  name = corpus-run\n}\n";
        cfg.command.name = "corpus-run";
    } else {
        throw apxgrp::ConfigError("--config is required for this command");
    }
    if (name != "run") cfg.command.name = name;
    for (const auto& f : opts.flags) {
        auto eq = f.find('=');
        if (eq == std::string::npos) throw apxgrp::ConfigError("--flag expects key=value, got '" + f + "'");
        cfg.command.flags[f.substr(0, eq)] = f.substr(eq + 1);
    }
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.threads_set) cfg.threads = opts.threads;
    if (!opts.out_dir.empty()) cfg.output.dir = opts.out_dir;
    if (!opts.formats.empty()) {
        cfg.output.csv = opts.formats.find("csv") != std::string::npos;
        cfg.output.json = opts.formats.find("json") != std::string::npos;
    }
    if (!opts.cache.empty()) cfg.output.cache = opts.cache == "on";

    apxgrp::RunReport rep = apxgrp::run_compute(cfg);
    apxgrp::write_outputs(rep, cfg);
    std::cout << rep.doc["outputs"].dump(2) << "\n";
    std::cout << "report: " << cfg.output.dir << "/report.json  checksum "
              << rep.doc["checksum"].get<std::string>() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite approximate-subgroup statistics over pluggable group backends"};
    app.require_subcommand(1);

    std::map<std::string, CommonOpts> opts;
    std::vector<std::string> names = apxgrp::known_commands();
    names.push_back("run");
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        add_common(sub, opts[name]);
    }
    std::string report_path;
    auto* verify = app.add_subcommand("verify-report", "recompute a report's checksum from its embedded config");
    verify->add_option("path", report_path, "report.json path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (verify->parsed()) {
            bool ok = apxgrp::verify_report(report_path);
            std::cout << (ok ? "pass" : "fail") << "\n";
            return ok ? 0 : 4;
        }
        for (const auto& [name, o] : opts)
            if (app.get_subcommand(name)->parsed()) return run_command(name, o);
        return 2;
    } catch (const apxgrp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const apxgrp::BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const apxgrp::OverflowError& e) {
        std::cerr << "overflow: " << e.what() << "\n";
        return 3;
    } catch (const apxgrp::InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#include "commands.hpp"

#include "fatoulab/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void common_flags(CLI::App* sub, fatoulab::cli::Options& o) {
    sub->add_option("--config", o.config_path, "experiment config (JSON)")->required()->envname("FATOULAB_CONFIG");
    sub->add_option("--out", o.out_dir, "output directory")->envname("FATOULAB_OUT");
    sub->add_option("--precision-bits", o.precision_bits, "MPFR precision in bits")
        ->envname("FATOULAB_PRECISION_BITS")
        ->check(CLI::Range(16u, 1u << 20));
    sub->add_option("--threads", o.threads, "worker threads")->envname("FATOULAB_THREADS")->check(CLI::Range(1u, 1024u));
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = fatoulab::cli;
    CLI::App app{"fatoulab: growth and Fatou-set experiments for entire functions"};
    app.require_subcommand(1);
    cli::Options opts;
    auto* construct = app.add_subcommand("construct", "build a Baker radii table");
    auto* analyze = app.add_subcommand("analyze", "run growth checks on a function");
    auto* verify = app.add_subcommand("verify-baker", "verify the Baker product claims");
    auto* render = app.add_subcommand("render", "escape-time grid");
    for (auto* sub : {construct, analyze, verify, render}) common_flags(sub, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::config_error;
    }

    try {
        const auto config = cli::resolve(opts);
        if (*construct) return cli::construct(config);
        if (*analyze) return cli::analyze(config);
        if (*verify) return cli::verify_baker(config);
        return cli::render(config);
    } catch (const fatoulab::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::config_error;
    }
}

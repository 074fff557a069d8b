#include <iostream>

#include "CLI11.hpp"
#include "rmstable/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stable Hermitian random matrix toolkit"};
    app.require_subcommand(1);

    rms::CliOptions opt;
    std::uint64_t seed = 0;
    const std::vector<std::string> commands{"sample", "cf", "dp-check", "clt", "tail"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1, 256));
        sub->add_flag("--verbose", opt.verbose);
    }
    std::vector<std::filesystem::path> runs;
    auto* report = app.add_subcommand("report", "aggregate summaries of earlier runs");
    report->add_option("runs", runs, "run directories")->required();
    report->add_option("--out", opt.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : rms::kConfigError;
    }

    auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "report") return rms::run_report(runs, opt.out, std::cerr);
    if (sub->get_option("--seed")->count() > 0) opt.seed = seed;
    return rms::run_command(sub->get_name(), opt, std::cerr);
}

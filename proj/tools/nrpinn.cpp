// Experiment front-end: nrpinn <command> <config.ini> [--set section.key=value ...]

#include "nrpinn/cli/commands.hpp"
#include "nrpinn/util/alloc.hpp"
#include "nrpinn/util/log.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>

namespace {

enum Exit { ok = 0, usage = 1, config = 2, numeric = 3, io = 4 };

int run(const std::string &command, const std::string &path, const std::vector<std::string> &overrides) {
    using namespace nrpinn;
    const auto cfg = cli::load_config(path, overrides);
    bool failed = false;
    if (command == "meta-train") {
        (void)cli::cmd_meta_train(cfg);
    } else if (command == "solve") {
        failed = cli::cmd_solve(cfg).failure.has_value();
    } else if (command == "inverse") {
        failed = cli::cmd_inverse(cfg).failure.has_value();
    } else if (command == "compare") {
        for (const auto &row : cli::cmd_compare(cfg)) {
            failed = failed || row.result.failure.has_value();
        }
    } else {
        (void)cli::cmd_oracle(cfg);
    }
    return failed ? numeric : ok;
}

}  // namespace

int main(int argc, char **argv) {
    nrpinn::util::configure_allocator();
    CLI::App app{"Reptile-initialized physics-informed neural networks"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string path;
    std::vector<std::string> overrides;
    bool verbose = false;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "Log progress to stderr");
    app.add_flag("-q,--quiet", quiet, "Suppress warnings");
    const std::vector<std::pair<const char *, const char *>> commands{
        {"meta-train", "Meta-train an initialization and write its checkpoint"},
        {"solve", "Train a forward problem from the configured init"},
        {"inverse", "Identify the Burgers viscosity from data"},
        {"compare", "Train the same problem from every listed init scheme"},
        {"oracle", "Write the reference solution on the evaluation grid"},
    };
    for (const auto &[name, help] : commands) {
        auto *sub = app.add_subcommand(name, help);
        sub->add_option("config", path, "Experiment config (INI)")->required()->check(CLI::ExistingFile);
        sub->add_option("--set", overrides, "Override a config value: section.key=value");
    }
    CLI11_PARSE(app, argc, argv);
    nrpinn::util::set_log_level(quiet     ? nrpinn::util::LogLevel::quiet
                                : verbose ? nrpinn::util::LogLevel::info
                                          : nrpinn::util::LogLevel::warn);
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, path, overrides);
    } catch (const nrpinn::ConfigError &e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return config;
    } catch (const nrpinn::UnsupportedError &e) {
        fmt::print(stderr, "unsupported: {}\n", e.what());
        return config;
    } catch (const nrpinn::NumericError &e) {
        fmt::print(stderr, "numeric error{}: {}\n", e.term().empty() ? "" : " in " + e.term(), e.what());
        return numeric;
    } catch (const nrpinn::IoError &e) {
        fmt::print(stderr, "i/o error: {}\n", e.what());
        return io;
    }
}

// Acceptance runner: one PASS/FAIL line per criterion. Exit status 1 when any selected
// criterion fails or throws.

#include "acceptance.hpp"

#include "nrpinn/util/alloc.hpp"
#include "nrpinn/util/log.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <chrono>
#include <ctime>
#include <exception>
#include <set>

namespace acceptance {

long cpu_now() { return static_cast<long>(std::clock()); }

double cpu_seconds_since(long start) {
    return static_cast<double>(std::clock() - start) / CLOCKS_PER_SEC;
}

}  // namespace acceptance

int main(int argc, char **argv) {
    nrpinn::util::configure_allocator();
    CLI::App app{"nrpinn acceptance criteria"};
    std::vector<std::string> only;
    std::string work = "acceptance_work";
    bool list = false;
    app.add_option("--only", only, "Run only these criteria (A1 ... A10)");
    app.add_option("--work", work, "Scratch directory; meta checkpoints are cached there");
    app.add_flag("--list", list, "Print the criteria and exit");
    CLI11_PARSE(app, argc, argv);
    nrpinn::util::set_log_level(nrpinn::util::LogLevel::warn);

    std::vector<acceptance::Criterion> all = acceptance::property_criteria();
    for (auto &c : acceptance::trend_criteria()) {
        all.push_back(std::move(c));
    }
    std::sort(all.begin(), all.end(), [](const auto &a, const auto &b) {
        return std::stoi(a.id.substr(1)) < std::stoi(b.id.substr(1));
    });
    if (list) {
        for (const auto &c : all) {
            fmt::print("{} {}\n", c.id, c.title);
        }
        return 0;
    }
    const std::set<std::string> wanted(only.begin(), only.end());
    for (const auto &w : wanted) {
        if (std::none_of(all.begin(), all.end(), [&](const auto &c) { return c.id == w; })) {
            fmt::print(stderr, "unknown criterion {}\n", w);
            return 2;
        }
    }

    const acceptance::Context ctx{NRPINN_SOURCE_DIR, std::filesystem::absolute(work), NRPINN_CLI_PATH};
    std::filesystem::create_directories(ctx.work_dir);
    int failed = 0;
    for (const auto &c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) {
            continue;
        }
        const auto wall0 = std::chrono::steady_clock::now();
        acceptance::Outcome out;
        try {
            out = c.run(ctx);
        } catch (const std::exception &e) {
            out = {false, fmt::format("threw: {}", e.what())};
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        failed += out.pass ? 0 : 1;
        fmt::print("{} {} {} [{:.1f} s] {}\n", c.id, out.pass ? "PASS" : "FAIL", c.title, wall, out.detail);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

#pragma once

#include "nrpinn/network/init.hpp"
#include "nrpinn/reptile/reptile.hpp"
#include "nrpinn/training/solve.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nrpinn::cli {

/// One entry of a comparison. `scheme` is an init scheme text ("xavier", "uniform:a:b",
/// "checkpoint:path", ...) or "meta:<config path>", which meta-trains from that config, or
/// reuses its checkpoint when the stored digest matches.
struct SchemeEntry {
    std::string label;
    std::string scheme;
};

struct ExperimentConfig {
    std::filesystem::path source;  // file the config was read from, empty for in-memory configs
    problems::PdeInstance problem = problems::Poisson1d{};
    net::MlpSpec network{{1, 50, 50, 50, 50, 1}};
    std::string init = "xavier";
    std::uint64_t init_seed = 0;
    std::optional<reptile::MetaConfig> meta;
    std::filesystem::path meta_checkpoint;  // where meta-train writes theta*
    training::TrainConfig train;
    double noise_pct = 0.0;  // inverse data noise, percent of the label std
    double nu_init = 0.05 / 3.14159265358979323846;
    training::EvalOptions eval;
    std::vector<SchemeEntry> compare;
    std::filesystem::path output_dir = "out";

    [[nodiscard]] problems::Family family() const { return problems::family_of(problem); }
};

/// Reads an INI file and applies `section.key=value` overrides on top of it. Unknown sections
/// or keys, malformed values and missing referenced files raise ConfigError.
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path &path,
                                           const std::vector<std::string> &overrides = {});

/// Same, from INI text (used by tests and the acceptance runner).
[[nodiscard]] ExperimentConfig parse_config(const std::string &ini_text, const std::vector<std::string> &overrides = {},
                                            const std::filesystem::path &source = {});

}  // namespace nrpinn::cli

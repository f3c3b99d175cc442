#pragma once

#include "nrpinn/cli/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nrpinn::cli {

/// Returns the checkpoint of `cfg`'s [meta] section, training and saving it unless a
/// checkpoint with the same digest already exists there.
std::filesystem::path ensure_meta_checkpoint(const ExperimentConfig &cfg);

/// Starting parameters for `scheme` (see SchemeEntry). Inverse runs get a "nu" slot at
/// cfg.nu_init.
[[nodiscard]] net::ParamVector resolve_init(const ExperimentConfig &cfg, const std::string &scheme);

/// Writes <dir>/meta.ckpt (or meta.checkpoint) with its sidecars; prints the digest.
std::filesystem::path cmd_meta_train(const ExperimentConfig &cfg);

/// Writes history.csv, solution.csv and summary.csv into the output directory.
training::SolveResult cmd_solve(const ExperimentConfig &cfg);

/// Inverse Burgers; writes history.csv (with the nu trace), solution.csv, summary.csv and
/// nu_summary.csv.
training::SolveResult cmd_inverse(const ExperimentConfig &cfg);

struct CompareRow {
    std::string label;
    training::SolveResult result;
};

/// Runs every [compare] scheme on the same point sets. Writes compare.csv (scheme, then the
/// history columns), summary.csv, one <label>.history.csv and <label>.solution.csv per scheme,
/// and nu_summary.csv for inverse problems.
std::vector<CompareRow> cmd_compare(const ExperimentConfig &cfg);

/// Reference solution on the evaluation grid: oracle.csv with coords..., value.
std::filesystem::path cmd_oracle(const ExperimentConfig &cfg);

/// Summary CSV: scheme, mae, rel_l2, iterations (last recorded row).
void write_summary_csv(const std::filesystem::path &path, const std::vector<CompareRow> &rows);

/// File-name-safe form of a scheme label.
[[nodiscard]] std::string slug(const std::string &label);

}  // namespace nrpinn::cli

#pragma once

#include "nrpinn/network/init.hpp"
#include "nrpinn/problems/tasks.hpp"
#include "nrpinn/training/loss.hpp"
#include "nrpinn/training/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nrpinn::reptile {

/// theta + eps * (theta_tilde - theta). Throws ConfigError on a length or layout mismatch and
/// warns when eps is outside [0, 1].
[[nodiscard]] net::ParamVector reptile_outer_update(const net::ParamVector &theta, const net::ParamVector &theta_tilde,
                                                    double eps);

/// eps0 * (1 - i / n) for sweep i in [0, n). Throws ConfigError outside that range.
[[nodiscard]] double epsilon_schedule(double eps0, int i, int n);

/// Loss a task adapts on: the data term for zero-order tasks, PDE + boundary (+ initial)
/// terms for high-order tasks.
[[nodiscard]] training::TrainingSets task_sets(const problems::Task &task);

struct InnerConfig {
    int steps = 20;
    training::OptimizerConfig optimizer;
    training::LossWeights weights;
    kernels::Backend backend = kernels::Backend::openmp;
};

struct InnerResult {
    net::ParamVector params;
    double loss_start = 0.0;  // at theta
    double loss_end = 0.0;    // at theta_tilde
};

/// k optimizer steps from a copy of theta with fresh optimizer state. Throws NumericError when
/// a loss or gradient becomes non-finite.
[[nodiscard]] InnerResult inner_adapt(const problems::Task &task, const net::MlpSpec &spec,
                                      const net::ParamVector &theta, const InnerConfig &cfg);

struct MetaConfig {
    net::MlpSpec spec{{1, 50, 50, 50, 50, 1}};
    net::InitScheme start = net::InitScheme::xavier();  // theta before the first sweep
    int sweeps = 1;                                      // N
    int tasks_per_sweep = 1;                             // L
    int supervised = 0;                                  // L_z, the first tasks of every sweep
    double eps0 = 1.0;
    InnerConfig inner;
    problems::TaskDistribution zero_order = problems::TaskDistribution::defaults(problems::InfoKind::zero_order,
                                                                                 problems::Family::poisson1d);
    problems::TaskDistribution high_order = problems::TaskDistribution::defaults(problems::InfoKind::high_order,
                                                                                 problems::Family::poisson1d);
    std::uint64_t seed = 0;

    /// Throws ConfigError unless 0 <= L_z <= L, k >= 1, eps0 >= 0, N >= 1 and the distributions
    /// have the matching kinds and the network's family shape.
    void validate() const;
    /// Canonical text of every field; equal texts give equal checkpoints.
    [[nodiscard]] std::string describe() const;
    /// 16 hex digits of a 64-bit FNV-1a hash of describe().
    [[nodiscard]] std::string digest() const;
};

struct OuterRecord {
    int sweep = 0;
    int task = 0;
    problems::InfoKind kind = problems::InfoKind::high_order;
    double epsilon = 0.0;
    double loss_start = 0.0;
    double loss_end = 0.0;
    bool skipped = false;
};

struct MetaCounters {
    long zero_order_sampled = 0;
    long high_order_sampled = 0;
    long skipped = 0;
};

struct MetaCheckpoint {
    net::MlpSpec spec;
    net::ParamVector params;
    std::string digest;
    std::vector<OuterRecord> trace;
    MetaCounters counters;
};

/// Sweeps i = 0..N-1 over L tasks each: the first L_z tasks are zero order, the rest high
/// order. Each task is adapted from the current theta and folded back with
/// eps = epsilon_schedule(eps0, i, N). Tasks whose adaptation fails numerically are skipped
/// with a warning; a sweep in which every task fails throws NumericError.
[[nodiscard]] MetaCheckpoint meta_init(const MetaConfig &cfg);

/// Writes the network checkpoint at `path`, `<path>.json` (digest, config text, counters)
/// and `<path>.outer_loss.csv`.
void save_meta_checkpoint(const std::filesystem::path &path, const MetaCheckpoint &ck, const MetaConfig &cfg);

/// Digest stored in the provenance sidecar, or nullopt when there is none.
[[nodiscard]] std::optional<std::string> read_checkpoint_digest(const std::filesystem::path &path);

void write_outer_loss_csv(const std::filesystem::path &path, const std::vector<OuterRecord> &trace);

}  // namespace nrpinn::reptile

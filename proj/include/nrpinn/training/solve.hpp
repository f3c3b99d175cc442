#pragma once

#include "nrpinn/training/evaluation.hpp"
#include "nrpinn/training/loss.hpp"
#include "nrpinn/training/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nrpinn::training {

/// Point budgets, optimizer and bookkeeping for one training run.
struct TrainConfig {
    Eigen::Index interior = 500;
    Eigen::Index boundary = 2;
    Eigen::Index initial = 0;
    Eigen::Index data = 0;
    int iterations = 900;
    OptimizerConfig optimizer;
    LossWeights weights;
    int eval_interval = 100;
    std::uint64_t seed = 0;
    kernels::Backend backend = kernels::Backend::openmp;

    /// Throws ConfigError for negative counts, negative iterations or eval_interval < 1.
    void validate() const;
};

struct HistoryRow {
    int iteration = 0;
    LossBreakdown loss;
    double mae = 0.0;
    double rel_l2 = 0.0;
    std::optional<double> nu;
};

struct RunHistory {
    std::vector<HistoryRow> rows;

    [[nodiscard]] const HistoryRow &last() const { return rows.back(); }
    /// Columns: iteration, loss_pde, loss_ic, loss_bc, loss_data, loss_total, mae, rel_l2, nu_estimate.
    void write_csv(const std::filesystem::path &path) const;
};

struct SolveResult {
    net::ParamVector params;
    RunHistory history;
    /// Set when a numeric error stopped the run; history holds the rows recorded before it.
    std::optional<std::string> failure;
    std::string failed_term;
};

/// Samples the training sets of a forward run once. Interior, boundary, initial and data
/// sets use seeds derived from cfg.seed, so two configs with the same seed and counts share
/// the same points whatever the initialization. Data labels come from `labels`.
[[nodiscard]] TrainingSets sample_training_sets(const problems::PdeInstance &inst, const TrainConfig &cfg,
                                                const sampler::Labeler &labels);

/// Full-batch training loop on prepared sets. History rows are recorded at iteration 0,
/// every eval_interval iterations and at the last iteration; the losses in a row are those
/// of the parameters evaluated at that iteration.
[[nodiscard]] SolveResult train(const problems::PdeInstance &inst, const net::MlpSpec &spec,
                                const net::ParamVector &init, const TrainingSets &sets, const TrainConfig &cfg,
                                const Evaluation &eval);

/// Forward problem: samples sets (data labels from the reference) and trains.
[[nodiscard]] SolveResult solve(const problems::PdeInstance &inst, const net::MlpSpec &spec,
                                const net::ParamVector &init, const TrainConfig &cfg, const Evaluation &eval);

/// Inverse Burgers: loss = PDE term with the trainable nu + data term. Only cfg.interior
/// collocation points are sampled; `data` must be labeled and nonempty and `init` must have a
/// "nu" slot. Warns when the estimate leaves [0, 0.1/pi].
[[nodiscard]] SolveResult solve_inverse(const problems::PdeInstance &inst, const net::MlpSpec &spec,
                                        const net::ParamVector &init, const sampler::PointSet &data,
                                        const TrainConfig &cfg, const Evaluation &eval);

/// Relative error of the nu estimate against the instance's true value.
[[nodiscard]] double nu_relative_error(const problems::PdeInstance &inst, double estimate);

}  // namespace nrpinn::training

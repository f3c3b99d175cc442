#pragma once

#include "nrpinn/kernels/jets.hpp"
#include "nrpinn/network/mlp.hpp"
#include "nrpinn/problems/oracles.hpp"
#include "nrpinn/sampler/points.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace nrpinn::training {

struct Metrics {
    double mae = 0.0;
    double rel_l2 = 0.0;
};

/// MAE and relative L2 of `pred` against `ref`. Throws ConfigError on length mismatch and
/// NumericError when ||ref|| = 0 (relative L2 undefined).
[[nodiscard]] Metrics metrics(std::span<const double> pred, std::span<const double> ref);

/// Grid sizes; 0 keeps the family default (poisson1d 1001, poisson2d 256x256,
/// burgers 256x100, schrodinger 256x201).
struct EvalOptions {
    int nx = 0;
    int ny = 0;
};

/// Fixed evaluation grid with reference values. The compared field is u, except for
/// schrodinger where it is |h| = sqrt(u^2 + v^2).
struct Evaluation {
    problems::Family family = problems::Family::poisson1d;
    kernels::Points points;
    std::vector<double> reference;
    std::optional<problems::Grid2d> grid;  // oracle-backed families keep the grid for labeling
    std::optional<problems::SchrodingerSolution> spectral;

    [[nodiscard]] Eigen::Index size() const { return points.cols(); }
};

[[nodiscard]] Evaluation make_evaluation(const problems::PdeInstance &inst, const EvalOptions &opts = {});

/// Network field on the evaluation points (u, or |h| for schrodinger).
[[nodiscard]] std::vector<double> predict_field(const net::MlpSpec &spec, const net::ParamVector &params,
                                                const Evaluation &eval,
                                                kernels::Backend backend = kernels::Backend::openmp);

/// Reference labels (per network output) for data sets. Throws UnsupportedError for
/// schrodinger, whose reference is |h| only on the snapshot grid.
[[nodiscard]] sampler::Labeler reference_labeler(const problems::PdeInstance &inst, const Evaluation &eval);

/// Solution-grid CSV: coords..., pred, ref, abs_err.
void write_solution_csv(const std::filesystem::path &path, const Evaluation &eval, std::span<const double> pred);

}  // namespace nrpinn::training

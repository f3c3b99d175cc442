#pragma once

#include "nrpinn/kernels/jets.hpp"
#include "nrpinn/network/mlp.hpp"
#include "nrpinn/problems/pde.hpp"
#include "nrpinn/sampler/points.hpp"

#include <span>

namespace nrpinn::training {

struct LossWeights {
    double pde = 1.0;
    double ic = 1.0;
    double bc = 1.0;
    double data = 1.0;
};

/// Mean squared residual or mismatch per term; total = sum of weighted terms.
struct LossBreakdown {
    double pde = 0.0;
    double ic = 0.0;
    double bc = 0.0;
    double data = 0.0;
    double total = 0.0;
};

/// Point sets entering the loss; empty sets contribute 0.
struct TrainingSets {
    sampler::PointSet interior;
    sampler::PointSet boundary;
    sampler::PointSet initial;
    sampler::PointSet data;
};

/// Composite PINN loss. When `grad` is non-empty (length params.size()) it receives
/// d(total)/d(params). For burgers_inverse the residual reads nu from the "nu" slot.
///
/// Terms:
///  pde  mean over interior points of the squared residual (summed over components)
///  bc   labeled: mean squared mismatch; schrodinger: periodic pairs compared in h and h_x
///  ic   mean squared mismatch with the initial labels
///  data mean squared mismatch with the data labels
/// Throws NumericError naming the term when a term or its gradient is not finite.
LossBreakdown compute_loss(const problems::PdeInstance &inst, const net::MlpSpec &spec,
                           const net::ParamVector &params, const TrainingSets &sets, const LossWeights &weights,
                           std::span<double> grad = {}, kernels::Backend backend = kernels::Backend::openmp);

}  // namespace nrpinn::training

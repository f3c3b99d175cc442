#include "nrpinn/training/loss.hpp"

#include "nrpinn/autodiff/tape.hpp"

#include <fmt/format.h>

namespace nrpinn::training {

using kernels::BlockView;
using kernels::OutputJets;
using problems::Family;

namespace {

// Interior residual head. Each point runs a small tape over its jet components so the
// residual expression is the same template used everywhere else.
kernels::LossHead pde_head(const problems::PdeInstance &inst, const kernels::Tracking &tr, double scale,
                           const std::optional<std::size_t> &nu_slot, double nu) {
    const Family fam = problems::family_of(inst);
    const int outs = problems::output_dim(fam);
    const bool y_dim = fam == Family::poisson2d;
    return [&inst, tr, scale, nu_slot, nu, outs, y_dim](const BlockView &b, OutputJets &adj, std::span<double> direct) {
        thread_local ad::Tape tape;
        thread_local std::vector<double> bar;
        const OutputJets &j = *b.jets;
        const int dirs = tr.dir_count();
        double loss = 0.0;
        double nu_bar = 0.0;
        std::array<double, 2> p{};
        for (Eigen::Index c = 0; c < j.points(); ++c) {
            tape.clear();
            problems::Fields<ad::Var> f;
            for (int o = 0; o < outs; ++o) {
                f.u[o] = tape.variable(j.value(o, c));
                f.u_x[o] = tape.variable(j.d1[0](o, c));
                f.u_xx[o] = tape.variable(j.d2[0](o, c));
                if (y_dim) {
                    f.u_y[o] = tape.variable(j.d1[1](o, c));
                    f.u_yy[o] = tape.variable(j.d2[1](o, c));
                } else if (dirs > 1) {
                    f.u_t[o] = tape.variable(j.d1[1](o, c));
                }
            }
            const ad::Var nu_var = nu_slot ? tape.variable(nu) : ad::Var(nu);
            for (int i = 0; i < b.points->rows(); ++i) {
                p[i] = (*b.points)(i, b.first + c);
            }
            const auto r = problems::residual(inst, f, std::span<const double>(p.data(), b.points->rows()), nu_var);
            ad::Var sq = r[0] * r[0];
            if (outs == 2) {
                sq = sq + r[1] * r[1];
            }
            loss += sq.value();
            tape.backward(sq, bar);
            for (int o = 0; o < outs; ++o) {
                adj.value(o, c) = scale * bar[f.u[o].index()];
                adj.d1[0](o, c) = scale * bar[f.u_x[o].index()];
                adj.d2[0](o, c) = scale * bar[f.u_xx[o].index()];
                if (y_dim) {
                    adj.d1[1](o, c) = scale * bar[f.u_y[o].index()];
                    adj.d2[1](o, c) = scale * bar[f.u_yy[o].index()];
                } else if (dirs > 1) {
                    adj.d1[1](o, c) = scale * bar[f.u_t[o].index()];
                }
            }
            if (nu_slot) {
                nu_bar += bar[nu_var.index()];
            }
        }
        if (nu_slot) {
            direct[*nu_slot] += scale * nu_bar;
        }
        return scale * loss;
    };
}

// Mean over points of sum_o (u_o - y_o)^2.
kernels::LossHead labeled_head(const sampler::PointSet &set, double scale) {
    return [&set, scale](const BlockView &b, OutputJets &adj, std::span<double>) {
        const OutputJets &j = *b.jets;
        const auto y = set.values.middleCols(b.first, j.points());
        const Eigen::ArrayXXd diff = j.value.array() - y.array();
        adj.value = (2.0 * scale) * diff.matrix();
        return scale * diff.square().sum();
    };
}

// Periodic pairs (2i, 2i+1): squared mismatch of every output and its x-derivative.
kernels::LossHead periodic_head(double scale) {
    return [scale](const BlockView &b, OutputJets &adj, std::span<double>) {
        const OutputJets &j = *b.jets;
        double loss = 0.0;
        for (Eigen::Index c = 0; c + 1 < j.points(); c += 2) {
            for (Eigen::Index o = 0; o < j.value.rows(); ++o) {
                const double dv = j.value(o, c) - j.value(o, c + 1);
                const double dx = j.d1[0](o, c) - j.d1[0](o, c + 1);
                loss += dv * dv + dx * dx;
                adj.value(o, c) = 2 * scale * dv;
                adj.value(o, c + 1) = -2 * scale * dv;
                adj.d1[0](o, c) = 2 * scale * dx;
                adj.d1[0](o, c + 1) = -2 * scale * dx;
            }
        }
        return scale * loss;
    };
}

void check_labels(const sampler::PointSet &set, int outs, const char *term) {
    if (!set.empty() && set.values.rows() != outs) {
        throw ConfigError(fmt::format("{} set needs {} label rows, has {}", term, outs, set.values.rows()));
    }
}

double run_term(const char *term, const net::MlpSpec &spec, const net::ParamVector &params,
                const sampler::PointSet &set, const kernels::Tracking &tr, const kernels::LossHead &head,
                double weight, std::span<double> grad, std::vector<double> &scratch, kernels::Backend backend) {
    if (set.empty()) {
        return 0.0;
    }
    double value = 0.0;
    if (grad.empty()) {
        value = kernels::value(spec, params, set.coords, tr, head, backend);
    } else {
        scratch.assign(params.size(), 0.0);
        value = kernels::value_and_grad(spec, params, set.coords, tr, head, scratch, backend);
    }
    if (!std::isfinite(value)) {
        throw NumericError(fmt::format("loss term '{}' is not finite", term), term);
    }
    if (!grad.empty()) {
        for (std::size_t i = 0; i < grad.size(); ++i) {
            if (!std::isfinite(scratch[i])) {
                throw NumericError(fmt::format("gradient of loss term '{}' is not finite", term), term);
            }
            grad[i] += weight * scratch[i];
        }
    }
    return value;
}

}  // namespace

LossBreakdown compute_loss(const problems::PdeInstance &inst, const net::MlpSpec &spec,
                           const net::ParamVector &params, const TrainingSets &sets, const LossWeights &weights,
                           std::span<double> grad, kernels::Backend backend) {
    const Family fam = problems::family_of(inst);
    const int outs = problems::output_dim(fam);
    if (spec.output_dim() != outs || spec.input_dim() != problems::input_dim(fam)) {
        throw ConfigError(fmt::format("network shape does not fit {}", problems::to_string(fam)));
    }
    if (!grad.empty() && grad.size() != params.size()) {
        throw ConfigError("compute_loss: gradient buffer length mismatch");
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    check_labels(sets.initial, outs, "initial");
    check_labels(sets.data, outs, "data");
    if (fam != Family::schrodinger) {
        check_labels(sets.boundary, outs, "boundary");
    } else if (sets.boundary.size() % 2 != 0) {
        throw ConfigError("schrodinger boundary set must hold whole periodic pairs");
    }

    std::optional<std::size_t> nu_slot;
    double nu = 0.0;
    if (fam == Family::burgers_inverse) {
        nu_slot = params.slot_index(net::kNuSlot);
        if (!nu_slot) {
            throw ConfigError("burgers_inverse needs a 'nu' parameter slot");
        }
        nu = params.values()[*nu_slot];
    }

    std::vector<double> scratch;
    LossBreakdown out;
    auto inv = [](const sampler::PointSet &s) { return s.empty() ? 0.0 : 1.0 / static_cast<double>(s.size()); };
    const auto none = kernels::Tracking::none();
    out.pde = run_term("pde", spec, params, sets.interior, problems::residual_tracking(fam),
                       pde_head(inst, problems::residual_tracking(fam), inv(sets.interior), nu_slot, nu), weights.pde,
                       grad, scratch, backend);
    if (fam == Family::schrodinger) {
        const double pairs = sets.boundary.empty() ? 0.0 : 2.0 / static_cast<double>(sets.boundary.size());
        out.bc = run_term("bc", spec, params, sets.boundary, kernels::Tracking::first_order({0}), periodic_head(pairs),
                          weights.bc, grad, scratch, backend);
    } else {
        out.bc = run_term("bc", spec, params, sets.boundary, none, labeled_head(sets.boundary, inv(sets.boundary)),
                          weights.bc, grad, scratch, backend);
    }
    out.ic = run_term("ic", spec, params, sets.initial, none, labeled_head(sets.initial, inv(sets.initial)),
                      weights.ic, grad, scratch, backend);
    out.data = run_term("data", spec, params, sets.data, none, labeled_head(sets.data, inv(sets.data)), weights.data,
                        grad, scratch, backend);
    out.total = weights.pde * out.pde + weights.ic * out.ic + weights.bc * out.bc + weights.data * out.data;
    return out;
}

}  // namespace nrpinn::training

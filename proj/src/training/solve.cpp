#include "nrpinn/training/solve.hpp"

#include "nrpinn/util/log.hpp"
#include "nrpinn/util/random.hpp"

#include <fmt/format.h>

#include <fstream>
#include <numbers>

namespace nrpinn::training {

using problems::Family;

void TrainConfig::validate() const {
    if (interior < 0 || boundary < 0 || initial < 0 || data < 0) {
        throw ConfigError("point counts must be nonnegative");
    }
    if (iterations < 0) {
        throw ConfigError("iterations must be nonnegative");
    }
    if (eval_interval < 1) {
        throw ConfigError("eval_interval must be at least 1");
    }
    optimizer.validate();
}

void RunHistory::write_csv(const std::filesystem::path &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "iteration,loss_pde,loss_ic,loss_bc,loss_data,loss_total,mae,rel_l2,nu_estimate\n";
    for (const auto &r : rows) {
        out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},", r.iteration, r.loss.pde,
                           r.loss.ic, r.loss.bc, r.loss.data, r.loss.total, r.mae, r.rel_l2);
        if (r.nu) {
            out << fmt::format("{:.17g}", *r.nu);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

TrainingSets sample_training_sets(const problems::PdeInstance &inst, const TrainConfig &cfg,
                                  const sampler::Labeler &labels) {
    cfg.validate();
    const Family fam = problems::family_of(inst);
    TrainingSets s;
    s.interior = sampler::sample_interior(inst, cfg.interior, util::derive_seed(cfg.seed, "interior"));
    if (cfg.boundary > 0) {
        s.boundary = sampler::sample_boundary(inst, cfg.boundary, util::derive_seed(cfg.seed, "boundary"));
    }
    if (cfg.initial > 0) {
        if (!problems::domain_of(fam).time_dependent) {
            throw ConfigError(fmt::format("{} has no initial condition", problems::to_string(fam)));
        }
        s.initial = sampler::sample_initial(inst, cfg.initial, util::derive_seed(cfg.seed, "initial"));
    }
    if (cfg.data > 0) {
        s.data = sampler::sample_data(inst, cfg.data, util::derive_seed(cfg.seed, "data"), labels);
    }
    return s;
}

namespace {

std::optional<double> nu_of(const net::ParamVector &p) {
    if (auto i = p.slot_index(net::kNuSlot)) {
        return p.values()[*i];
    }
    return std::nullopt;
}

}  // namespace

SolveResult train(const problems::PdeInstance &inst, const net::MlpSpec &spec, const net::ParamVector &init,
                  const TrainingSets &sets, const TrainConfig &cfg, const Evaluation &eval) {
    cfg.validate();
    if (eval.family != problems::family_of(inst)) {
        throw ConfigError("evaluation grid belongs to another family");
    }
    SolveResult res;
    res.params = init;
    Optimizer opt(cfg.optimizer, init.size());
    std::vector<double> grad(init.size());
    const bool inverse = problems::family_of(inst) == Family::burgers_inverse;
    bool warned = false;
    for (int it = 0; it <= cfg.iterations; ++it) {
        const bool record = it % cfg.eval_interval == 0 || it == cfg.iterations;
        const bool step = it < cfg.iterations;
        try {
            const auto loss = compute_loss(inst, spec, res.params, sets, cfg.weights,
                                           step ? std::span<double>(grad) : std::span<double>(), cfg.backend);
            if (record) {
                HistoryRow row;
                row.iteration = it;
                row.loss = loss;
                const auto m = metrics(predict_field(spec, res.params, eval, cfg.backend), eval.reference);
                row.mae = m.mae;
                row.rel_l2 = m.rel_l2;
                row.nu = nu_of(res.params);
                res.history.rows.push_back(row);
            }
        } catch (const NumericError &e) {
            res.failure = e.what();
            res.failed_term = e.term();
            util::warn("training stopped at iteration {}: {}", it, e.what());
            return res;
        }
        if (step) {
            opt.step(res.params.values(), grad);
        }
        if (inverse && !warned) {
            const double nu = res.params.slot(net::kNuSlot);
            if (nu < 0.0 || nu > 0.1 / std::numbers::pi) {
                util::warn("nu estimate {:.6g} left [0, 0.1/pi] at iteration {}", nu, it + 1);
                warned = true;
            }
        }
    }
    return res;
}

SolveResult solve(const problems::PdeInstance &inst, const net::MlpSpec &spec, const net::ParamVector &init,
                  const TrainConfig &cfg, const Evaluation &eval) {
    sampler::Labeler labels;
    if (cfg.data > 0) {
        labels = reference_labeler(inst, eval);
    }
    return train(inst, spec, init, sample_training_sets(inst, cfg, labels), cfg, eval);
}

SolveResult solve_inverse(const problems::PdeInstance &inst, const net::MlpSpec &spec, const net::ParamVector &init,
                          const sampler::PointSet &data, const TrainConfig &cfg, const Evaluation &eval) {
    if (problems::family_of(inst) != Family::burgers_inverse) {
        throw ConfigError("solve_inverse needs a burgers_inverse instance");
    }
    if (data.empty() || !data.labeled()) {
        throw ConfigError("solve_inverse needs a nonempty labeled data set");
    }
    if (!init.has_slot(net::kNuSlot)) {
        throw ConfigError("solve_inverse needs a 'nu' parameter slot");
    }
    cfg.validate();
    TrainingSets sets;
    sets.interior = sampler::sample_interior(inst, cfg.interior, util::derive_seed(cfg.seed, "interior"));
    sets.data = data;
    return train(inst, spec, init, sets, cfg, eval);
}

double nu_relative_error(const problems::PdeInstance &inst, double estimate) {
    const auto *b = std::get_if<problems::BurgersInverse>(&inst);
    if (b == nullptr) {
        throw ConfigError("nu error is defined for burgers_inverse only");
    }
    return std::abs(estimate - b->nu_true) / b->nu_true;
}

}  // namespace nrpinn::training

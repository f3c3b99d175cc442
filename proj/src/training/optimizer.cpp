#include "nrpinn/training/optimizer.hpp"

#include "nrpinn/errors.hpp"

#include <cmath>
#include <string>

namespace nrpinn::training {

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(std::string_view name) {
    if (name == "sgd") {
        return OptimizerKind::sgd;
    }
    if (name == "adam") {
        return OptimizerKind::adam;
    }
    throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
    if (!(learning_rate >= 0)) {
        throw ConfigError("learning rate must be non-negative");
    }
    if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) {
        throw ConfigError("adam betas must lie in [0, 1)");
    }
    if (!(eps > 0)) {
        throw ConfigError("adam epsilon must be positive");
    }
}

Optimizer::Optimizer(const OptimizerConfig &config, std::size_t size) : config_(config) {
    config_.validate();
    if (config_.kind == OptimizerKind::adam) {
        m_.assign(size, 0.0);
        v_.assign(size, 0.0);
    }
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != grad.size()) {
        throw ConfigError("optimizer: parameter and gradient lengths differ");
    }
    ++t_;
    const double lr = config_.learning_rate;
    if (config_.kind == OptimizerKind::sgd) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            params[i] -= lr * grad[i];
        }
        return;
    }
    if (m_.size() != params.size()) {
        throw ConfigError("optimizer: state was sized for a different parameter vector");
    }
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grad[i];
        m_[i] = b1 * m_[i] + (1.0 - b1) * g;
        v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
        params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + config_.eps);
    }
}

}  // namespace nrpinn::training

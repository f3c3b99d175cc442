#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace nrpinn::training {

enum class OptimizerKind { sgd, adam };

[[nodiscard]] std::string_view to_string(OptimizerKind k);
[[nodiscard]] OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    /// Throws ConfigError for a negative rate or betas outside [0, 1).
    void validate() const;
};

/// SGD or bias-corrected Adam over a flat parameter vector.
class Optimizer {
  public:
    Optimizer(const OptimizerConfig &config, std::size_t size);

    /// One update in place; throws ConfigError on length mismatch.
    void step(std::span<double> params, std::span<const double> grad);

    [[nodiscard]] const OptimizerConfig &config() const { return config_; }
    [[nodiscard]] long timestep() const { return t_; }
    [[nodiscard]] const std::vector<double> &first_moment() const { return m_; }
    [[nodiscard]] const std::vector<double> &second_moment() const { return v_; }

  private:
    OptimizerConfig config_;
    std::vector<double> m_;
    std::vector<double> v_;
    long t_ = 0;
};

}  // namespace nrpinn::training

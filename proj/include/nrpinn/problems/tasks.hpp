#pragma once

#include "nrpinn/problems/pde.hpp"
#include "nrpinn/sampler/points.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace nrpinn::problems {

/// zero_order: labeled solutions of sampled problems. high_order: the sampled PDEs themselves.
enum class InfoKind { zero_order, high_order };

[[nodiscard]] std::string_view to_string(InfoKind k);

struct TaskBudget {
    Eigen::Index interior = 1000;
    Eigen::Index boundary = 2;
    Eigen::Index initial = 0;
    Eigen::Index labeled = 1000;
    int fd_grid = 64;  // finite-difference intervals for poisson2d labels
};

struct Range {
    double lo = 0;
    double hi = 1;
};

struct TaskDistribution {
    InfoKind kind = InfoKind::high_order;
    Family family = Family::poisson1d;
    Range alpha{0, 1};  // poisson1d high order
    Range beta{0, 2};
    Range zeta{0, 2};   // poisson1d zero order: every zeta_i and eta_i
    std::vector<int> source_counts{1, 5, 10};
    Range source_xy{0.1, 0.9};
    Range source_c{0.8, 1.2};
    Range nu{0, 0.1 / kPi};
    Range lambda{0, 1};
    TaskBudget budget;

    /// Family ranges; burgers zero-order tasks use nu in [0.005/pi, 0.1/pi].
    /// burgers_inverse draws ordinary burgers tasks.
    [[nodiscard]] static TaskDistribution defaults(InfoKind kind, Family family);
    /// Throws ConfigError for empty ranges, negative budgets or unsupported combinations.
    void validate() const;
};

/// u = zeta1 sin(eta1 x) + zeta2 cos(eta2 x) - zeta3 x + eta3.
struct Poisson1dSolutionFamily {
    std::array<double, 3> zeta{};
    std::array<double, 3> eta{};

    [[nodiscard]] double operator()(double x) const;
};

struct Task {
    InfoKind kind = InfoKind::high_order;
    PdeInstance instance;
    std::optional<Poisson1dSolutionFamily> solution;  // zero-order poisson1d coefficients
    sampler::PointSet interior;
    sampler::PointSet boundary;
    sampler::PointSet initial;
    sampler::PointSet labeled;
};

/// Deterministic per seed. Zero-order tasks carry only `labeled`; high-order tasks carry the
/// instance with its interior, boundary and (time-dependent) initial sets.
[[nodiscard]] Task sample_task(const TaskDistribution &dist, std::uint64_t seed);

/// Zero-order poisson1d task with given coefficients, labeled on `n` interior points.
[[nodiscard]] Task poisson1d_zero_order_task(const Poisson1dSolutionFamily &coefficients, Eigen::Index n,
                                             std::uint64_t seed);

}  // namespace nrpinn::problems

#include "nrpinn/problems/pde.hpp"

#include "nrpinn/problems/oracles.hpp"

#include <fmt/format.h>

namespace nrpinn::problems {

Family family_of(const PdeInstance &inst) {
    return std::visit(
        [](const auto &pde) {
            using P = std::decay_t<decltype(pde)>;
            if constexpr (std::is_same_v<P, Poisson1d>) {
                return Family::poisson1d;
            } else if constexpr (std::is_same_v<P, Poisson2d>) {
                return Family::poisson2d;
            } else if constexpr (std::is_same_v<P, Burgers>) {
                return Family::burgers;
            } else if constexpr (std::is_same_v<P, Schrodinger>) {
                return Family::schrodinger;
            } else {
                return Family::burgers_inverse;
            }
        },
        inst);
}

std::string_view to_string(Family f) {
    switch (f) {
    case Family::poisson1d:
        return "poisson1d";
    case Family::poisson2d:
        return "poisson2d";
    case Family::burgers:
        return "burgers";
    case Family::schrodinger:
        return "schrodinger";
    case Family::burgers_inverse:
        return "burgers_inverse";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    for (auto f : {Family::poisson1d, Family::poisson2d, Family::burgers, Family::schrodinger,
                   Family::burgers_inverse}) {
        if (name == to_string(f)) {
            return f;
        }
    }
    throw ConfigError(fmt::format("unknown problem family '{}'", name));
}

std::string describe(const PdeInstance &inst) {
    return std::visit(
        [](const auto &pde) -> std::string {
            using P = std::decay_t<decltype(pde)>;
            if constexpr (std::is_same_v<P, Poisson1d>) {
                return fmt::format("poisson1d alpha={} beta={}", pde.alpha, pde.beta);
            } else if constexpr (std::is_same_v<P, Poisson2d>) {
                return fmt::format("poisson2d sources={}", pde.sources.size());
            } else if constexpr (std::is_same_v<P, Burgers>) {
                return fmt::format("burgers nu={}", pde.nu);
            } else if constexpr (std::is_same_v<P, Schrodinger>) {
                return fmt::format("schrodinger lambda={}", pde.lambda);
            } else {
                return fmt::format("burgers_inverse nu_true={}", pde.nu_true);
            }
        },
        inst);
}

std::vector<HeatSource> benchmark_heat_sources() {
    const double a[] = {0.15, 0.18, 0.20, 0.31, 0.43, 0.56, 0.70, 0.80};
    const double b[] = {0.34, 0.31, 0.65, 0.86, 0.65, 0.38, 0.64, 0.12};
    const double c[] = {0.84, 1.07, 1.12, 0.83, 1.12, 1.11, 0.99, 0.91};
    std::vector<HeatSource> s;
    for (int i = 0; i < 8; ++i) {
        s.push_back({a[i], b[i], c[i]});
    }
    return s;
}

PdeInstance target_instance(Family f) {
    switch (f) {
    case Family::poisson1d:
        return Poisson1d{};
    case Family::poisson2d:
        return Poisson2d{benchmark_heat_sources()};
    case Family::burgers:
        return Burgers{};
    case Family::schrodinger:
        return Schrodinger{};
    case Family::burgers_inverse:
        return BurgersInverse{};
    }
    throw ConfigError("unknown family");
}

namespace {

void require(bool ok, const std::string &what) {
    if (!ok) {
        throw ConfigError(what);
    }
}

}  // namespace

void validate(const PdeInstance &inst) {
    std::visit(
        [](const auto &pde) {
            using P = std::decay_t<decltype(pde)>;
            if constexpr (std::is_same_v<P, Poisson1d>) {
                require(pde.alpha >= 0 && pde.alpha <= 1, "poisson1d: alpha outside [0,1]");
                require(pde.beta >= 0 && pde.beta <= 2, "poisson1d: beta outside [0,2]");
            } else if constexpr (std::is_same_v<P, Poisson2d>) {
                for (const auto &s : pde.sources) {
                    require(s.a >= 0.1 && s.a <= 0.9 && s.b >= 0.1 && s.b <= 0.9,
                            "poisson2d: source location outside [0.1,0.9]");
                    require(s.c >= 0.8 && s.c <= 1.2, "poisson2d: source strength outside [0.8,1.2]");
                }
            } else if constexpr (std::is_same_v<P, Burgers>) {
                require(pde.nu >= 0 && pde.nu <= 0.1 / kPi, "burgers: nu outside [0, 0.1/pi]");
            } else if constexpr (std::is_same_v<P, Schrodinger>) {
                require(pde.lambda >= 0 && pde.lambda <= 1, "schrodinger: lambda outside [0,1]");
            } else {
                require(pde.nu_true > 0 && pde.nu_true <= 0.1 / kPi, "burgers_inverse: nu_true outside (0, 0.1/pi]");
            }
        },
        inst);
}

bool Domain::contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim()) {
        return false;
    }
    for (int i = 0; i < dim(); ++i) {
        if (!(p[i] >= lo[i] && p[i] <= hi[i])) {
            return false;
        }
    }
    return true;
}

Domain domain_of(Family f) {
    switch (f) {
    case Family::poisson1d:
        return {{-10.0}, {10.0}, false};
    case Family::poisson2d:
        return {{0.0, 0.0}, {1.0, 1.0}, false};
    case Family::burgers:
    case Family::burgers_inverse:
        return {{-1.0, 0.0}, {1.0, 1.0}, true};
    case Family::schrodinger:
        return {{-5.0, 0.0}, {5.0, kPi / 2}, true};
    }
    throw ConfigError("unknown family");
}

int input_dim(Family f) { return domain_of(f).dim(); }

int output_dim(Family f) { return f == Family::schrodinger ? 2 : 1; }

kernels::Tracking residual_tracking(Family f) {
    switch (f) {
    case Family::poisson1d:
        return kernels::Tracking::with_second({0}, {true});
    case Family::poisson2d:
        return kernels::Tracking::with_second({0, 1}, {true, true});
    default:
        return kernels::Tracking::with_second({0, kTimeDim}, {true, false});
    }
}

Poisson1dExact poisson1d_exact(const Poisson1d &pde, double x) {
    const double a = pde.alpha;
    const double b = pde.beta;
    return {std::sin(a * x) + std::cos(b * x) - 0.1 * x, a * std::cos(a * x) - b * std::sin(b * x) - 0.1,
            -a * a * std::sin(a * x) - b * b * std::cos(b * x)};
}

std::array<double, 2> initial_condition(Family f, double x) {
    switch (f) {
    case Family::burgers:
    case Family::burgers_inverse:
        return {-std::sin(kPi * x), 0.0};
    case Family::schrodinger:
        return {2.0 / std::cosh(x), 0.0};
    default:
        throw ConfigError(fmt::format("{} has no initial condition", to_string(f)));
    }
}

std::vector<double> exact_solution(const PdeInstance &inst, std::span<const double> p) {
    const Family fam = family_of(inst);
    if (static_cast<int>(p.size()) != input_dim(fam)) {
        throw ConfigError("exact_solution: wrong number of coordinates");
    }
    return std::visit(
        [&](const auto &pde) -> std::vector<double> {
            using P = std::decay_t<decltype(pde)>;
            if constexpr (std::is_same_v<P, Poisson1d>) {
                return {poisson1d_exact(pde, p[0]).u};
            } else if constexpr (std::is_same_v<P, Poisson2d>) {
                return {oracle_poisson2d_fd(pde.sources, 255).interpolate(p[0], p[1])};
            } else if constexpr (std::is_same_v<P, Burgers>) {
                if (pde.nu <= 0) {
                    throw UnsupportedError("burgers: no reference for the inviscid limit");
                }
                return {oracle_burgers_cole_hopf(p[0], p[1], pde.nu)};
            } else if constexpr (std::is_same_v<P, BurgersInverse>) {
                return {oracle_burgers_cole_hopf(p[0], p[1], pde.nu_true)};
            } else {
                throw UnsupportedError("schrodinger: use the spectral oracle for reference values");
            }
        },
        inst);
}

}  // namespace nrpinn::problems

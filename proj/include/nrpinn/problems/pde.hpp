#pragma once

#include "nrpinn/autodiff/eval_jet.hpp"
#include "nrpinn/errors.hpp"
#include "nrpinn/kernels/jets.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nrpinn::problems {

inline constexpr double kPi = std::numbers::pi;

/// u'' = -alpha^2 sin(alpha x) - beta^2 cos(beta x) on (-10, 10), Dirichlet data from
/// u = sin(alpha x) + cos(beta x) - 0.1 x.
struct Poisson1d {
    double alpha = 0.7;
    double beta = 1.5;
};

struct HeatSource {
    double a = 0.5;
    double b = 0.5;
    double c = 1.0;
};

/// -Laplace(u) = sum of Gaussian heat sources on [0,1]^2, u = 0 on the boundary.
struct Poisson2d {
    std::vector<HeatSource> sources;
};

/// u_t + u u_x = nu u_xx, x in [-1,1], t in [0,1], u(x,0) = -sin(pi x), u(+-1,t) = 0.
struct Burgers {
    double nu = 0.01 / kPi;
};

/// i h_t + lambda h_xx + |h|^2 h = 0, x in [-5,5] periodic, t in [0, pi/2], h(0,x) = 2 sech(x).
/// Network outputs are (u, v) with h = u + i v.
struct Schrodinger {
    double lambda = 0.5;
};

/// Burgers with nu unknown; nu_true only generates data and the reference.
struct BurgersInverse {
    double nu_true = 0.01 / kPi;
};

using PdeInstance = std::variant<Poisson1d, Poisson2d, Burgers, Schrodinger, BurgersInverse>;

enum class Family { poisson1d, poisson2d, burgers, schrodinger, burgers_inverse };

[[nodiscard]] Family family_of(const PdeInstance &inst);
[[nodiscard]] std::string_view to_string(Family f);
[[nodiscard]] Family parse_family(std::string_view name);
/// Human-readable one-line description with coefficients.
[[nodiscard]] std::string describe(const PdeInstance &inst);

/// The eight heat sources of the benchmark 2-D Poisson problem.
[[nodiscard]] std::vector<HeatSource> benchmark_heat_sources();
/// The forward problem solved in the experiments for each family.
[[nodiscard]] PdeInstance target_instance(Family f);

/// Throws ConfigError when coefficients leave the family's parameter ranges.
void validate(const PdeInstance &inst);

/// Axis-aligned domain; coordinates are (x) for poisson1d, (x, y) for poisson2d and
/// (x, t) for the time-dependent families.
struct Domain {
    std::vector<double> lo;
    std::vector<double> hi;
    bool time_dependent = false;

    [[nodiscard]] int dim() const { return static_cast<int>(lo.size()); }
    [[nodiscard]] bool contains(std::span<const double> p) const;
};

[[nodiscard]] Domain domain_of(Family f);
[[nodiscard]] int input_dim(Family f);
[[nodiscard]] int output_dim(Family f);
/// Input derivatives the residual needs: x (second order) for every family, plus y (second)
/// for poisson2d and t (first) for the time-dependent ones.
[[nodiscard]] kernels::Tracking residual_tracking(Family f);

inline constexpr int kTimeDim = 1;  // coordinate index of t in time-dependent families

/// Derivative ingredients of one point, per output: u, u_x, u_xx and either (u_y, u_yy) or u_t.
template <class T>
struct Fields {
    std::array<T, 2> u{};
    std::array<T, 2> u_x{};
    std::array<T, 2> u_xx{};
    std::array<T, 2> u_y{};
    std::array<T, 2> u_yy{};
    std::array<T, 2> u_t{};
};

/// PDE residual at point `p`. `nu` is the trainable viscosity for burgers_inverse and ignored
/// otherwise. Returns the residual components; their count is output_dim(family).
template <class T>
std::array<T, 2> residual(const PdeInstance &inst, const Fields<T> &f, std::span<const double> p, const T &nu) {
    using std::cos;
    using std::exp;
    using std::sin;
    const double x = p[0];
    return std::visit(
        [&](const auto &pde) -> std::array<T, 2> {
            using P = std::decay_t<decltype(pde)>;
            if constexpr (std::is_same_v<P, Poisson1d>) {
                const double a = pde.alpha;
                const double b = pde.beta;
                return {f.u_xx[0] + a * a * std::sin(a * x) + b * b * std::cos(b * x), T(0.0)};
            } else if constexpr (std::is_same_v<P, Poisson2d>) {
                const double y = p[1];
                double src = 0.0;
                for (const auto &s : pde.sources) {
                    src += s.c * std::exp(-((x - s.a) * (x - s.a) + (y - s.b) * (y - s.b)) / 0.01);
                }
                return {-(f.u_xx[0] + f.u_yy[0]) - src, T(0.0)};
            } else if constexpr (std::is_same_v<P, Burgers>) {
                return {f.u_t[0] + f.u[0] * f.u_x[0] - pde.nu * f.u_xx[0], T(0.0)};
            } else if constexpr (std::is_same_v<P, BurgersInverse>) {
                return {f.u_t[0] + f.u[0] * f.u_x[0] - nu * f.u_xx[0], T(0.0)};
            } else {
                const double lam = pde.lambda;
                const T m = f.u[0] * f.u[0] + f.u[1] * f.u[1];
                return {-f.u_t[1] + lam * f.u_xx[0] + m * f.u[0], f.u_t[0] + lam * f.u_xx[1] + m * f.u[1]};
            }
        },
        inst);
}

/// Collects Fields from a jet bundle; throws ConfigError if a needed dimension is not tracked.
template <class T>
Fields<T> fields_from(Family fam, const ad::JetBundle<T> &j) {
    Fields<T> f;
    const int outs = output_dim(fam);
    if (static_cast<int>(j.outputs.size()) != outs) {
        throw ConfigError("residual: family " + std::string(to_string(fam)) + " expects " + std::to_string(outs) +
                          " network outputs");
    }
    for (int o = 0; o < outs; ++o) {
        f.u[o] = j.value(o);
        f.u_x[o] = j.d1(o, 0);
        f.u_xx[o] = j.d2(o, 0, 0);
        if (fam == Family::poisson2d) {
            f.u_y[o] = j.d1(o, 1);
            f.u_yy[o] = j.d2(o, 1, 1);
        } else if (domain_of(fam).time_dependent) {
            f.u_t[o] = j.d1(o, kTimeDim);
        }
    }
    return f;
}

/// Residual straight from network jets.
template <class T>
std::vector<T> residual(const PdeInstance &inst, const ad::JetBundle<T> &jets, std::span<const double> p,
                        const T &nu = T(0.0)) {
    const Family fam = family_of(inst);
    const auto r = residual(inst, fields_from(fam, jets), p, nu);
    return {r.begin(), r.begin() + output_dim(fam)};
}

/// Closed-form or oracle-backed reference at a point (values per output). poisson2d solves
/// the finite-difference oracle on each call; use a ReferenceSolution for repeated queries.
/// Throws UnsupportedError for schrodinger (use the spectral oracle) and for burgers with nu <= 0.
[[nodiscard]] std::vector<double> exact_solution(const PdeInstance &inst, std::span<const double> p);

/// Poisson 1-D family solution and its first two derivatives.
struct Poisson1dExact {
    double u;
    double u_x;
    double u_xx;
};
[[nodiscard]] Poisson1dExact poisson1d_exact(const Poisson1d &pde, double x);

/// Initial condition values per output for time-dependent families.
[[nodiscard]] std::array<double, 2> initial_condition(Family f, double x);

}  // namespace nrpinn::problems

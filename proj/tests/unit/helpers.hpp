#pragma once

// Test-only oracles. Everything here goes through net::forward or plain doubles, never through
// the derivative code under test.

#include "nrpinn/network/init.hpp"
#include "nrpinn/network/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace testing_helpers {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

/// Central first and second differences of output `out` along input `dim`.
struct FdJet {
    double d1;
    double d2;
};

inline FdJet fd_input(const nrpinn::net::MlpSpec &spec, const nrpinn::net::ParamVector &p,
                      std::vector<double> x, int dim, int out, double h) {
    const double x0 = x[dim];
    const double f0 = nrpinn::net::forward(spec, p, x)[out];
    x[dim] = x0 + h;
    const double fp = nrpinn::net::forward(spec, p, x)[out];
    x[dim] = x0 - h;
    const double fm = nrpinn::net::forward(spec, p, x)[out];
    return {(fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)};
}

/// Central-difference gradient of a scalar function of the flat parameters.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)> &f,
                                       std::vector<double> p, double h) {
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double s = p[i];
        p[i] = s + h;
        const double up = f(p);
        p[i] = s - h;
        const double dn = f(p);
        p[i] = s;
        g[i] = (up - dn) / (2 * h);
    }
    return g;
}

inline double max_rel_err(std::span<const double> got, std::span<const double> want) {
    double worst = 0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        worst = std::max(worst, rel_err(got[i], want[i]));
    }
    return worst;
}

/// Network with weights of order one so derivatives are not trivially small.
inline nrpinn::net::ParamVector random_params(const nrpinn::net::MlpSpec &spec, std::uint64_t seed,
                                              std::vector<nrpinn::net::ExtraSlot> extras = {}) {
    auto p = nrpinn::net::init(spec, nrpinn::net::InitScheme::uniform(-1.0, 1.0), seed, extras);
    if (spec.adaptive_slope) {
        p.set_slot(nrpinn::net::kSlopeSlot, 0.13);
    }
    return p;
}

}  // namespace testing_helpers

#pragma once

#include "nrpinn/autodiff/tape.hpp"

#include <functional>
#include <span>
#include <vector>

namespace nrpinn::ad {

/// max_i |analytic_i - numeric_i| / max(1, |numeric_i|) with central differences of `f`.
/// Throws ConfigError for step <= 0 and NumericError when f is not finite.
[[nodiscard]] double check_gradient(const std::function<double(std::span<const double>)> &f,
                                    std::span<const double> analytic, std::span<const double> params,
                                    double step);

/// Same check with the analytic gradient taken from the tape. `f` must be callable with both
/// std::span<const double> and std::span<const Var> (a generic lambda).
template <class F>
[[nodiscard]] double check_gradient(F &&f, std::span<const double> params, double step) {
    Tape tape;
    const std::vector<Var> leaves = tape.variables(params);
    const Var loss = f(std::span<const Var>(leaves));
    const std::vector<double> grad = grad_params(loss, leaves);
    return check_gradient([&f](std::span<const double> p) -> double { return f(p); }, grad, params, step);
}

}  // namespace nrpinn::ad

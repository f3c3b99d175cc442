#pragma once

#include "nrpinn/autodiff/jet.hpp"
#include "nrpinn/errors.hpp"
#include "nrpinn/network/mlp.hpp"

#include <span>
#include <string>
#include <vector>

namespace nrpinn::ad {

/// Network outputs as jets along the tracked input coordinates.
template <class T>
struct JetBundle {
    std::vector<Jet2<T>> outputs;
    std::vector<int> tracked;  // input coordinate for each jet direction

    [[nodiscard]] int direction_of(int input_dim) const {
        for (std::size_t k = 0; k < tracked.size(); ++k) {
            if (tracked[k] == input_dim) {
                return static_cast<int>(k);
            }
        }
        throw ConfigError("input dimension " + std::to_string(input_dim) + " is not tracked");
    }

    [[nodiscard]] const T &value(int out) const { return outputs.at(out).value; }
    [[nodiscard]] const T &d1(int out, int input_dim) const {
        return outputs.at(out).d1[direction_of(input_dim)];
    }
    /// Pure second derivatives only; a mixed pair is a ConfigError.
    [[nodiscard]] const T &d2(int out, int dim_a, int dim_b) const {
        if (dim_a != dim_b) {
            throw ConfigError("mixed second derivatives are not supported");
        }
        return outputs.at(out).d2[direction_of(dim_a)];
    }
};

/// Throws ConfigError for out-of-range, repeated, or too many tracked dimensions.
void check_tracked(const net::MlpSpec &spec, std::span<const int> tracked);

/// Output value, first and pure second derivatives along `tracked` at input point `x`.
/// `values` must follow the layout of `layout` (for T = Var, leaves created from it).
template <class T>
JetBundle<T> eval_jet(const net::MlpSpec &spec, const net::ParamVector &layout,
                      std::span<const T> values, std::span<const double> x,
                      std::span<const int> tracked) {
    net::check_layout(spec, layout);
    check_tracked(spec, tracked);
    if (values.size() != layout.size()) {
        throw ConfigError("eval_jet: parameter count mismatch");
    }
    if (static_cast<int>(x.size()) != spec.input_dim()) {
        throw ConfigError("eval_jet: input has " + std::to_string(x.size()) + " coordinates, expected " +
                          std::to_string(spec.input_dim()));
    }
    using std::sin;
    using std::tanh;
    const int dirs = static_cast<int>(tracked.size());

    std::vector<Jet2<T>> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        a[i] = Jet2<T>::constant(T(x[i]), dirs);
    }
    for (int k = 0; k < dirs; ++k) {
        a[tracked[k]] = Jet2<T>::variable(T(x[tracked[k]]), k, dirs);
    }

    T slope(1.0);
    if (spec.adaptive_slope) {
        slope = T(static_cast<double>(spec.slope_scale)) * values[*layout.slot_index(net::kSlopeSlot)];
    }

    const auto &layers = layout.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const net::LayerShape &shape = layers[l];
        std::vector<Jet2<T>> z(shape.rows);
        for (int r = 0; r < shape.rows; ++r) {
            Jet2<T> acc = Jet2<T>::constant(T(0.0), dirs);
            const std::size_t row = shape.weight_offset + static_cast<std::size_t>(r) * shape.cols;
            for (int c = 0; c < shape.cols; ++c) {
                acc = acc + values[row + c] * a[c];
            }
            z[r] = acc + values[shape.bias_offset + r];
        }
        if (l + 1 < layers.size()) {
            for (auto &zr : z) {
                const Jet2<T> s = spec.adaptive_slope ? slope * zr : zr;
                zr = spec.activation == net::Activation::tanh ? tanh(s) : sin(s);
            }
        }
        a = std::move(z);
    }
    return {std::move(a), std::vector<int>(tracked.begin(), tracked.end())};
}

/// Plain-double convenience overload.
inline JetBundle<double> eval_jet(const net::MlpSpec &spec, const net::ParamVector &params,
                                  std::span<const double> x, std::span<const int> tracked) {
    return eval_jet<double>(spec, params, params.values(), x, tracked);
}

}  // namespace nrpinn::ad

#include "nrpinn/network/mlp.hpp"

#include "nrpinn/autodiff/eval_jet.hpp"
#include "nrpinn/errors.hpp"

#include <algorithm>

namespace nrpinn::net {

std::string_view to_string(Activation a) { return a == Activation::tanh ? "tanh" : "sin"; }

Activation parse_activation(std::string_view name) {
    if (name == "tanh") {
        return Activation::tanh;
    }
    if (name == "sin") {
        return Activation::sin;
    }
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

void MlpSpec::validate() const {
    if (widths.size() < 2) {
        throw ConfigError("network needs at least an input and an output width");
    }
    if (std::any_of(widths.begin(), widths.end(), [](int w) { return w < 1; })) {
        throw ConfigError("network widths must be >= 1");
    }
    if (slope_scale < 1) {
        throw ConfigError("slope_scale must be >= 1");
    }
}

std::size_t MlpSpec::network_size() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        n += static_cast<std::size_t>(widths[l + 1]) * widths[l] + widths[l + 1];
    }
    return n;
}

std::vector<LayerShape> layer_shapes(const MlpSpec &spec) {
    spec.validate();
    std::vector<LayerShape> shapes;
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
        LayerShape s;
        s.rows = spec.widths[l + 1];
        s.cols = spec.widths[l];
        s.weight_offset = offset;
        s.bias_offset = offset + static_cast<std::size_t>(s.rows) * s.cols;
        offset = s.bias_offset + s.rows;
        shapes.push_back(s);
    }
    return shapes;
}

ParamVector::ParamVector(const MlpSpec &spec, std::vector<std::string> extra_names)
    : layers_(layer_shapes(spec)), extra_names_(std::move(extra_names)), network_size_(spec.network_size()) {
    if (spec.adaptive_slope &&
        std::find(extra_names_.begin(), extra_names_.end(), kSlopeSlot) == extra_names_.end()) {
        extra_names_.insert(extra_names_.begin(), std::string(kSlopeSlot));
    }
    for (std::size_t i = 0; i < extra_names_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (extra_names_[i] == extra_names_[j]) {
                throw ConfigError("duplicate extra slot '" + extra_names_[i] + "'");
            }
        }
    }
    values_.assign(network_size_ + extra_names_.size(), 0.0);
}

ParamVector ParamVector::unflatten(const MlpSpec &spec, std::span<const double> flat,
                                   std::vector<std::string> extra_names) {
    ParamVector p(spec, std::move(extra_names));
    if (flat.size() != p.size()) {
        throw ConfigError("unflatten: expected " + std::to_string(p.size()) + " values, got " +
                          std::to_string(flat.size()));
    }
    std::copy(flat.begin(), flat.end(), p.values_.begin());
    return p;
}

std::optional<std::size_t> ParamVector::slot_index(std::string_view name) const {
    for (std::size_t i = 0; i < extra_names_.size(); ++i) {
        if (extra_names_[i] == name) {
            return network_size_ + i;
        }
    }
    return std::nullopt;
}

double ParamVector::slot(std::string_view name) const {
    const auto idx = slot_index(name);
    if (!idx) {
        throw ConfigError("parameter vector has no slot '" + std::string(name) + "'");
    }
    return values_[*idx];
}

void ParamVector::set_slot(std::string_view name, double value) {
    const auto idx = slot_index(name);
    if (!idx) {
        throw ConfigError("parameter vector has no slot '" + std::string(name) + "'");
    }
    values_[*idx] = value;
}

void check_layout(const MlpSpec &spec, const ParamVector &params) {
    if (params.network_size() != spec.network_size() ||
        params.layers().size() != static_cast<std::size_t>(spec.layer_count())) {
        throw ConfigError("parameter vector does not match the network spec");
    }
    const auto &layers = params.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].rows != spec.widths[l + 1] || layers[l].cols != spec.widths[l]) {
            throw ConfigError("parameter vector layer " + std::to_string(l) + " has the wrong shape");
        }
    }
    if (spec.adaptive_slope && !params.has_slot(kSlopeSlot)) {
        throw ConfigError("adaptive network requires a 'slope' slot");
    }
}

std::vector<double> forward(const MlpSpec &spec, const ParamVector &params, std::span<const double> x) {
    const auto bundle = ad::eval_jet(spec, params, x, {});
    std::vector<double> out;
    out.reserve(bundle.outputs.size());
    for (const auto &j : bundle.outputs) {
        out.push_back(j.value);
    }
    return out;
}

}  // namespace nrpinn::net

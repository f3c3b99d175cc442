#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nrpinn::net {

enum class Activation { tanh, sin };

[[nodiscard]] std::string_view to_string(Activation a);
[[nodiscard]] Activation parse_activation(std::string_view name);

/// Fully connected network. Hidden layers apply the activation, the last layer is linear.
/// With `adaptive_slope` the hidden activation becomes act(slope_scale * a * z) with one
/// trainable scalar `a` shared by every hidden layer.
struct MlpSpec {
    std::vector<int> widths;
    Activation activation = Activation::tanh;
    bool adaptive_slope = false;
    int slope_scale = 10;

    /// Throws ConfigError unless there are >= 2 widths, all >= 1, and slope_scale >= 1.
    void validate() const;

    [[nodiscard]] int input_dim() const { return widths.front(); }
    [[nodiscard]] int output_dim() const { return widths.back(); }
    [[nodiscard]] int layer_count() const { return static_cast<int>(widths.size()) - 1; }
    /// Number of weights and biases, excluding extra slots.
    [[nodiscard]] std::size_t network_size() const;

    bool operator==(const MlpSpec &) const = default;
};

/// Weight block of layer l is row-major rows x cols starting at weight_offset,
/// followed by `rows` biases at bias_offset.
struct LayerShape {
    int rows = 0;
    int cols = 0;
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;

    bool operator==(const LayerShape &) const = default;
};

[[nodiscard]] std::vector<LayerShape> layer_shapes(const MlpSpec &spec);

inline constexpr std::string_view kSlopeSlot = "slope";
inline constexpr std::string_view kNuSlot = "nu";

/// Flat trainable parameters: all layers (weights then biases) followed by named extra scalars.
class ParamVector {
  public:
    ParamVector() = default;

    /// Zero-filled vector for `spec`. The "slope" slot is prepended to the extras when the
    /// spec is adaptive and the caller did not list it.
    explicit ParamVector(const MlpSpec &spec, std::vector<std::string> extra_names = {});

    /// Throws ConfigError if `flat` does not have exactly network_size + |extras| entries.
    [[nodiscard]] static ParamVector unflatten(const MlpSpec &spec, std::span<const double> flat,
                                               std::vector<std::string> extra_names);

    [[nodiscard]] const std::vector<double> &flatten() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] std::size_t network_size() const { return network_size_; }
    [[nodiscard]] const std::vector<LayerShape> &layers() const { return layers_; }
    [[nodiscard]] const std::vector<std::string> &extra_names() const { return extra_names_; }

    [[nodiscard]] std::optional<std::size_t> slot_index(std::string_view name) const;
    [[nodiscard]] bool has_slot(std::string_view name) const { return slot_index(name).has_value(); }
    /// Throws ConfigError when the slot is absent.
    [[nodiscard]] double slot(std::string_view name) const;
    void set_slot(std::string_view name, double value);

    bool operator==(const ParamVector &) const = default;

  private:
    std::vector<double> values_;
    std::vector<LayerShape> layers_;
    std::vector<std::string> extra_names_;
    std::size_t network_size_ = 0;
};

/// Throws ConfigError if `params` was not laid out for `spec`.
void check_layout(const MlpSpec &spec, const ParamVector &params);

/// Plain evaluation; bit-identical to the value part of ad::eval_jet.
[[nodiscard]] std::vector<double> forward(const MlpSpec &spec, const ParamVector &params,
                                          std::span<const double> x);

}  // namespace nrpinn::net

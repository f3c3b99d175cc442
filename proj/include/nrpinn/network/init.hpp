#pragma once

#include "nrpinn/network/mlp.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nrpinn::net {

struct InitScheme {
    enum class Kind { xavier, uniform, normal, random, checkpoint };

    Kind kind = Kind::xavier;
    double low = 0.0;    // uniform
    double high = 0.0;   // uniform
    double sigma = 0.0;  // normal, mean zero
    std::string path;    // checkpoint

    static InitScheme xavier() { return {}; }
    static InitScheme uniform(double a, double b) { return {Kind::uniform, a, b, 0.0, {}}; }
    static InitScheme normal(double sigma) { return {Kind::normal, 0.0, 0.0, sigma, {}}; }
    static InitScheme random() { return {Kind::random, 0.0, 0.0, 0.0, {}}; }
    static InitScheme checkpoint(std::string p) { return {Kind::checkpoint, 0.0, 0.0, 0.0, std::move(p)}; }

    /// Parses "xavier", "random", "uniform:a:b", "normal:sigma", "checkpoint:path".
    static InitScheme parse(const std::string &text);
    [[nodiscard]] std::string describe() const;

    /// Throws ConfigError for a >= b, sigma <= 0, or an empty checkpoint path.
    void validate() const;
};

/// Named extra scalar appended after the network weights, with its starting value.
struct ExtraSlot {
    std::string name;
    double initial = 0.0;
};

/// Deterministic for a fixed seed.
///  - xavier: W ~ U(+-sqrt(6/(fan_in+fan_out))), b = 0
///  - uniform / normal: weights and biases from the distribution
///  - random: W, b ~ U(+-1/sqrt(fan_in))
///  - checkpoint: weights read from file (IoError when unreadable); widths must match.
/// The adaptive slope starts at 1/slope_scale so the effective slope is 1. Extra slots take
/// `extras[i].initial` unless the checkpoint already stores that slot (nu is always reset).
[[nodiscard]] ParamVector init(const MlpSpec &spec, const InitScheme &scheme, std::uint64_t seed,
                               const std::vector<ExtraSlot> &extras = {});

}  // namespace nrpinn::net

#pragma once

#include "nrpinn/network/mlp.hpp"

#include <string>

namespace nrpinn::net {

/// Binary layout (all integers little-endian, see docs/checkpoint_format.md):
///
///   offset  size  field
///   0       8     magic "NRPINNCK"
///   8       4     u32 format version (1)
///   12      4     u32 width count W
///   16      4*W   u32 widths
///   ..      1     u8 activation (0 tanh, 1 sin)
///   ..      1     u8 adaptive slope flag
///   ..      2     u16 reserved (0)
///   ..      4     u32 slope scale
///   ..      4     u32 extra slot count E
///   ..            E x (u16 name length, name bytes)
///   ..      8     u64 value count V
///   ..      8*V   IEEE-754 binary64 values, little-endian
struct Checkpoint {
    MlpSpec spec;
    ParamVector params;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Throws IoError on write failure.
void save_checkpoint(const std::string &path, const MlpSpec &spec, const ParamVector &params);

/// Throws IoError for a missing/truncated file or wrong magic, ConfigError for an inconsistent header.
[[nodiscard]] Checkpoint load_checkpoint(const std::string &path);

}  // namespace nrpinn::net

#include "nrpinn/network/checkpoint.hpp"

#include "nrpinn/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace nrpinn::net {

namespace {

constexpr char kMagic[8] = {'N', 'R', 'P', 'I', 'N', 'N', 'C', 'K'};

class Writer {
  public:
    template <class U>
    void put(U v) {
        const auto bits = std::bit_cast<std::array<unsigned char, sizeof(U)>>(v);
        if constexpr (std::endian::native == std::endian::little) {
            bytes.insert(bytes.end(), bits.begin(), bits.end());
        } else {
            bytes.insert(bytes.end(), bits.rbegin(), bits.rend());
        }
    }
    void put_bytes(const void *p, std::size_t n) {
        const auto *c = static_cast<const unsigned char *>(p);
        bytes.insert(bytes.end(), c, c + n);
    }
    std::vector<unsigned char> bytes;
};

class Reader {
  public:
    explicit Reader(std::vector<unsigned char> data) : data_(std::move(data)) {}

    template <class U>
    U get() {
        need(sizeof(U));
        std::array<unsigned char, sizeof(U)> bits{};
        std::memcpy(bits.data(), data_.data() + pos_, sizeof(U));
        if constexpr (std::endian::native != std::endian::little) {
            std::reverse(bits.begin(), bits.end());
        }
        pos_ += sizeof(U);
        return std::bit_cast<U>(bits);
    }
    std::string get_string(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char *>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    [[nodiscard]] bool at_end() const { return pos_ == data_.size(); }

  private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) {
            throw IoError("checkpoint truncated");
        }
    }
    std::vector<unsigned char> data_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string &path, const MlpSpec &spec, const ParamVector &params) {
    check_layout(spec, params);
    Writer w;
    w.put_bytes(kMagic, sizeof(kMagic));
    w.put<std::uint32_t>(kCheckpointVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(spec.widths.size()));
    for (int width : spec.widths) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(width));
    }
    w.put<std::uint8_t>(spec.activation == Activation::tanh ? 0 : 1);
    w.put<std::uint8_t>(spec.adaptive_slope ? 1 : 0);
    w.put<std::uint16_t>(0);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(spec.slope_scale));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params.extra_names().size()));
    for (const auto &name : params.extra_names()) {
        w.put<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
        w.put_bytes(name.data(), name.size());
    }
    w.put<std::uint64_t>(params.size());
    for (double v : params.values()) {
        w.put<double>(v);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out.write(reinterpret_cast<const char *>(w.bytes.data()), static_cast<std::streamsize>(w.bytes.size()));
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

Checkpoint load_checkpoint(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint '" + path + "'");
    }
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(std::move(data));
    if (r.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
        throw IoError("'" + path + "' is not a checkpoint");
    }
    const auto version = r.get<std::uint32_t>();
    if (version != kCheckpointVersion) {
        throw IoError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ck;
    const auto width_count = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < width_count; ++i) {
        ck.spec.widths.push_back(static_cast<int>(r.get<std::uint32_t>()));
    }
    ck.spec.activation = r.get<std::uint8_t>() == 0 ? Activation::tanh : Activation::sin;
    ck.spec.adaptive_slope = r.get<std::uint8_t>() != 0;
    (void)r.get<std::uint16_t>();
    ck.spec.slope_scale = static_cast<int>(r.get<std::uint32_t>());
    ck.spec.validate();
    std::vector<std::string> names(r.get<std::uint32_t>());
    for (auto &name : names) {
        name = r.get_string(r.get<std::uint16_t>());
    }
    const auto count = r.get<std::uint64_t>();
    std::vector<double> values(count);
    for (auto &v : values) {
        v = r.get<double>();
    }
    if (!r.at_end()) {
        throw IoError("trailing bytes in checkpoint '" + path + "'");
    }
    ck.params = ParamVector::unflatten(ck.spec, values, std::move(names));
    return ck;
}

}  // namespace nrpinn::net

#include "nrpinn/network/init.hpp"

#include "nrpinn/errors.hpp"
#include "nrpinn/network/checkpoint.hpp"
#include "nrpinn/util/random.hpp"

#include <cmath>
#include <sstream>

namespace nrpinn::net {

namespace {

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        parts.push_back(cur);
    }
    return parts;
}

double to_double(const std::string &s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw ConfigError("bad number '" + s + "'");
        }
        return v;
    } catch (const std::logic_error &) {
        throw ConfigError("bad number '" + s + "'");
    }
}

}  // namespace

InitScheme InitScheme::parse(const std::string &text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string tail = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    InitScheme s;
    if (head == "xavier" && tail.empty()) {
        s = xavier();
    } else if (head == "random" && tail.empty()) {
        s = random();
    } else if (head == "uniform") {
        const auto p = split(tail, ':');
        if (p.size() != 2) {
            throw ConfigError("uniform init expects uniform:low:high");
        }
        s = uniform(to_double(p[0]), to_double(p[1]));
    } else if (head == "normal") {
        s = normal(to_double(tail));
    } else if (head == "checkpoint") {
        s = checkpoint(tail);
    } else {
        throw ConfigError("unknown init scheme '" + text + "'");
    }
    s.validate();
    return s;
}

std::string InitScheme::describe() const {
    std::ostringstream out;
    out.precision(17);
    switch (kind) {
    case Kind::xavier: out << "xavier"; break;
    case Kind::random: out << "random"; break;
    case Kind::uniform: out << "uniform:" << low << ':' << high; break;
    case Kind::normal: out << "normal:" << sigma; break;
    case Kind::checkpoint: out << "checkpoint:" << path; break;
    }
    return out.str();
}

void InitScheme::validate() const {
    if (kind == Kind::uniform && !(low < high)) {
        throw ConfigError("uniform init requires low < high");
    }
    if (kind == Kind::normal && !(sigma > 0.0)) {
        throw ConfigError("normal init requires sigma > 0");
    }
    if (kind == Kind::checkpoint && path.empty()) {
        throw ConfigError("checkpoint init requires a path");
    }
}

ParamVector init(const MlpSpec &spec, const InitScheme &scheme, std::uint64_t seed,
                 const std::vector<ExtraSlot> &extras) {
    spec.validate();
    scheme.validate();
    std::vector<std::string> names;
    for (const auto &e : extras) {
        names.push_back(e.name);
    }
    ParamVector p(spec, names);
    auto values = p.values();

    if (scheme.kind == InitScheme::Kind::checkpoint) {
        const Checkpoint ck = load_checkpoint(scheme.path);
        if (ck.spec.widths != spec.widths || ck.spec.activation != spec.activation) {
            throw ConfigError("checkpoint '" + scheme.path + "' was written for a different network");
        }
        const auto src = ck.params.values();
        std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(spec.network_size()), values.begin());
        if (spec.adaptive_slope) {
            p.set_slot(kSlopeSlot, ck.params.has_slot(kSlopeSlot) ? ck.params.slot(kSlopeSlot)
                                                                  : 1.0 / spec.slope_scale);
        }
        for (const auto &e : extras) {
            if (e.name == kSlopeSlot) {
                continue;
            }
            const bool keep = e.name != kNuSlot && ck.params.has_slot(e.name);
            p.set_slot(e.name, keep ? ck.params.slot(e.name) : e.initial);
        }
        return p;
    }

    util::Rng rng(seed);
    for (const LayerShape &layer : p.layers()) {
        const double fan_in = layer.cols;
        const double fan_out = layer.rows;
        const std::size_t nw = static_cast<std::size_t>(layer.rows) * layer.cols;
        auto weights = values.subspan(layer.weight_offset, nw);
        auto biases = values.subspan(layer.bias_offset, layer.rows);
        switch (scheme.kind) {
        case InitScheme::Kind::xavier: {
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            for (double &w : weights) {
                w = rng.uniform(-bound, bound);
            }
            std::fill(biases.begin(), biases.end(), 0.0);
            break;
        }
        case InitScheme::Kind::random: {
            const double bound = 1.0 / std::sqrt(fan_in);
            for (double &w : weights) {
                w = rng.uniform(-bound, bound);
            }
            for (double &b : biases) {
                b = rng.uniform(-bound, bound);
            }
            break;
        }
        case InitScheme::Kind::uniform: {
            for (double &w : weights) {
                w = rng.uniform(scheme.low, scheme.high);
            }
            for (double &b : biases) {
                b = rng.uniform(scheme.low, scheme.high);
            }
            break;
        }
        case InitScheme::Kind::normal: {
            for (double &w : weights) {
                w = scheme.sigma * rng.normal();
            }
            for (double &b : biases) {
                b = scheme.sigma * rng.normal();
            }
            break;
        }
        case InitScheme::Kind::checkpoint: break;
        }
    }
    if (spec.adaptive_slope) {
        p.set_slot(kSlopeSlot, 1.0 / spec.slope_scale);
    }
    for (const auto &e : extras) {
        if (e.name != kSlopeSlot) {
            p.set_slot(e.name, e.initial);
        }
    }
    return p;
}

}  // namespace nrpinn::net

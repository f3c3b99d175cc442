#include "nrpinn/sampler/points.hpp"

#include "nrpinn/util/random.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace nrpinn::sampler {

using problems::Family;

std::string_view to_string(Role r) {
    switch (r) {
    case Role::interior:
        return "interior";
    case Role::boundary:
        return "boundary";
    case Role::initial:
        return "initial";
    case Role::data:
        return "data";
    }
    return "?";
}

Role parse_role(std::string_view name) {
    for (auto r : {Role::interior, Role::boundary, Role::initial, Role::data}) {
        if (name == to_string(r)) {
            return r;
        }
    }
    throw ConfigError(fmt::format("unknown point role '{}'", name));
}

namespace {

void check_count(Eigen::Index n) {
    if (n < 0) {
        throw ConfigError("point count must be non-negative");
    }
}

PointSet make(Role role, int dim, Eigen::Index n, int value_dim) {
    PointSet s;
    s.role = role;
    s.coords.resize(dim, n);
    s.values.resize(value_dim, n);
    return s;
}

}  // namespace

PointSet sample_interior(const problems::PdeInstance &inst, Eigen::Index n, std::uint64_t seed) {
    check_count(n);
    const Family fam = problems::family_of(inst);
    const auto dom = problems::domain_of(fam);
    util::Rng rng(seed);
    PointSet s = make(Role::interior, dom.dim(), n, 0);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (int i = 0; i < dom.dim(); ++i) {
            if (dom.time_dependent && i == problems::kTimeDim) {
                // (0, T]: t = 0 belongs to the initial set
                s.coords(i, j) = dom.hi[i] - (dom.hi[i] - dom.lo[i]) * rng.open01();
            } else {
                s.coords(i, j) = rng.uniform(dom.lo[i], dom.hi[i]);
            }
        }
    }
    return s;
}

PointSet sample_boundary(const problems::PdeInstance &inst, Eigen::Index n, std::uint64_t seed) {
    check_count(n);
    const Family fam = problems::family_of(inst);
    const auto dom = problems::domain_of(fam);
    util::Rng rng(seed);
    switch (fam) {
    case Family::poisson1d: {
        const auto &pde = std::get<problems::Poisson1d>(inst);
        PointSet s = make(Role::boundary, 1, n, 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double x = j % 2 == 0 ? dom.lo[0] : dom.hi[0];
            s.coords(0, j) = x;
            s.values(0, j) = problems::poisson1d_exact(pde, x).u;
        }
        return s;
    }
    case Family::poisson2d: {
        PointSet s = make(Role::boundary, 2, n, 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto edge = rng.below(4);
            const double r = rng.open01();
            const double x = edge < 2 ? r : static_cast<double>(edge - 2);
            const double y = edge < 2 ? static_cast<double>(edge) : r;
            s.coords(0, j) = x;
            s.coords(1, j) = y;
            s.values(0, j) = 0.0;
        }
        return s;
    }
    case Family::burgers:
    case Family::burgers_inverse: {
        PointSet s = make(Role::boundary, 2, n, 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            s.coords(0, j) = rng.below(2) == 0 ? dom.lo[0] : dom.hi[0];
            s.coords(1, j) = dom.hi[1] * rng.open01();
            s.values(0, j) = 0.0;
        }
        return s;
    }
    case Family::schrodinger: {
        if (n % 2 != 0) {
            throw ConfigError("schrodinger boundary points come in pairs; n must be even");
        }
        PointSet s = make(Role::boundary, 2, n, 0);
        for (Eigen::Index j = 0; j < n; j += 2) {
            const double t = dom.hi[1] * rng.open01();
            s.coords(0, j) = dom.lo[0];
            s.coords(0, j + 1) = dom.hi[0];
            s.coords(1, j) = t;
            s.coords(1, j + 1) = t;
        }
        return s;
    }
    }
    throw ConfigError("unknown family");
}

PointSet sample_initial(const problems::PdeInstance &inst, Eigen::Index n, std::uint64_t seed) {
    check_count(n);
    const Family fam = problems::family_of(inst);
    const auto dom = problems::domain_of(fam);
    if (!dom.time_dependent) {
        throw ConfigError(fmt::format("{} has no initial condition", problems::to_string(fam)));
    }
    const int outs = problems::output_dim(fam);
    util::Rng rng(seed);
    PointSet s = make(Role::initial, 2, n, outs);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double x = rng.uniform(dom.lo[0], dom.hi[0]);
        s.coords(0, j) = x;
        s.coords(1, j) = 0.0;
        const auto ic = problems::initial_condition(fam, x);
        for (int o = 0; o < outs; ++o) {
            s.values(o, j) = ic[o];
        }
    }
    return s;
}

PointSet sample_data(const problems::PdeInstance &inst, Eigen::Index n, std::uint64_t seed, const Labeler &labels) {
    PointSet s = sample_interior(inst, n, seed);
    s.role = Role::data;
    const int outs = problems::output_dim(problems::family_of(inst));
    s.values.resize(outs, n);
    std::vector<double> p(s.dim());
    for (Eigen::Index j = 0; j < n; ++j) {
        for (int i = 0; i < s.dim(); ++i) {
            p[i] = s.coords(i, j);
        }
        const auto v = labels(p);
        if (static_cast<int>(v.size()) != outs) {
            throw ConfigError("labeler returned the wrong number of values");
        }
        for (int o = 0; o < outs; ++o) {
            if (!std::isfinite(v[o])) {
                throw NumericError("non-finite label", "data");
            }
            s.values(o, j) = v[o];
        }
    }
    return s;
}

PointSet add_noise(const PointSet &set, double pct, std::uint64_t seed) {
    if (!set.labeled()) {
        throw ConfigError("add_noise: point set has no labels");
    }
    if (!(pct >= 0)) {
        throw ConfigError("add_noise: noise level must be non-negative");
    }
    PointSet out = set;
    if (pct == 0 || set.empty()) {
        return out;
    }
    util::Rng rng(seed);
    for (Eigen::Index r = 0; r < set.values.rows(); ++r) {
        const auto row = set.values.row(r).array();
        const double mean = row.mean();
        const double sd = std::sqrt((row - mean).square().mean());
        for (Eigen::Index j = 0; j < set.size(); ++j) {
            out.values(r, j) += pct * sd * rng.normal();
        }
    }
    return out;
}

std::vector<std::string> coordinate_names(Family f) {
    switch (f) {
    case Family::poisson1d:
        return {"x"};
    case Family::poisson2d:
        return {"x", "y"};
    default:
        return {"x", "t"};
    }
}

std::vector<std::string> value_names(Family f) {
    if (f == Family::schrodinger) {
        return {"u", "v"};
    }
    return {"u"};
}

void write_csv(const std::filesystem::path &path, const PointSet &set, const std::vector<std::string> &coord_names,
               const std::vector<std::string> &value_names) {
    if (static_cast<int>(coord_names.size()) != set.dim() ||
        static_cast<Eigen::Index>(value_names.size()) != set.values.rows()) {
        throw ConfigError("write_csv: column names do not match the point set");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    std::string header;
    for (const auto &n : coord_names) {
        header += (header.empty() ? "" : ",") + n;
    }
    for (const auto &n : value_names) {
        header += "," + n;
    }
    out << header << '\n';
    for (Eigen::Index j = 0; j < set.size(); ++j) {
        std::string line;
        for (int i = 0; i < set.dim(); ++i) {
            line += fmt::format("{}{:.17g}", i ? "," : "", set.coords(i, j));
        }
        for (Eigen::Index r = 0; r < set.values.rows(); ++r) {
            line += fmt::format(",{:.17g}", set.values(r, j));
        }
        out << line << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

PointSet read_csv(const std::filesystem::path &path, int dim, Role role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(path.string() + ": missing header");
    }
    const auto columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < dim) {
        throw IoError(fmt::format("{}: {} columns, need at least {}", path.string(), columns, dim));
    }
    std::vector<double> flat;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const char *p = line.data();
        const char *end = p + line.size();
        for (int c = 0; c < columns; ++c) {
            double v = 0;
            const auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc() || (c + 1 < columns && (next == end || *next != ','))) {
                throw IoError(fmt::format("{}: malformed row {}", path.string(), rows + 2));
            }
            flat.push_back(v);
            p = next + (c + 1 < columns ? 1 : 0);
        }
        if (p != end) {
            throw IoError(fmt::format("{}: extra fields in row {}", path.string(), rows + 2));
        }
        ++rows;
    }
    PointSet s = make(role, dim, static_cast<Eigen::Index>(rows), columns - dim);
    for (std::size_t j = 0; j < rows; ++j) {
        for (int c = 0; c < columns; ++c) {
            const double v = flat[j * columns + c];
            if (c < dim) {
                s.coords(c, j) = v;
            } else {
                s.values(c - dim, j) = v;
            }
        }
    }
    return s;
}

}  // namespace nrpinn::sampler

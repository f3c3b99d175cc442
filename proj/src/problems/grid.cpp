#include "nrpinn/problems/oracles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>

namespace nrpinn::problems {

namespace {

// Index of the cell containing v and the local coordinate in [0,1].
std::pair<std::size_t, double> locate(const std::vector<double> &axis, double v) {
    if (axis.size() == 1) {
        return {0, 0.0};
    }
    v = std::clamp(v, axis.front(), axis.back());
    auto it = std::upper_bound(axis.begin(), axis.end(), v);
    std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
    i = std::min(i, axis.size() - 2);
    return {i, (v - axis[i]) / (axis[i + 1] - axis[i])};
}

}  // namespace

double Grid2d::interpolate(double x, double y) const {
    const auto [i, fx] = locate(xs, x);
    const auto [j, fy] = locate(ys, y);
    const std::size_t i1 = std::min(i + 1, xs.size() - 1);
    const std::size_t j1 = std::min(j + 1, ys.size() - 1);
    return (1 - fx) * ((1 - fy) * at(i, j) + fy * at(i, j1)) + fx * ((1 - fy) * at(i1, j) + fy * at(i1, j1));
}

void write_grid_csv(const std::filesystem::path &path, const Grid2d &grid, std::string_view y_name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "x," << y_name << ",value\n";
    for (std::size_t i = 0; i < grid.xs.size(); ++i) {
        for (std::size_t j = 0; j < grid.ys.size(); ++j) {
            out << fmt::format("{:.17g},{:.17g},{:.17g}\n", grid.xs[i], grid.ys[j], grid.at(i, j));
        }
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace nrpinn::problems

#pragma once

#include "nrpinn/kernels/jets.hpp"
#include "nrpinn/problems/pde.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace nrpinn::sampler {

enum class Role { interior, boundary, initial, data };

[[nodiscard]] std::string_view to_string(Role r);
[[nodiscard]] Role parse_role(std::string_view name);

/// Points are columns of `coords` (input_dim x n). `values` is value_dim x n when labeled
/// and has zero rows otherwise.
struct PointSet {
    Role role = Role::interior;
    kernels::Points coords;
    Eigen::MatrixXd values;

    [[nodiscard]] Eigen::Index size() const { return coords.cols(); }
    [[nodiscard]] bool empty() const { return coords.cols() == 0; }
    [[nodiscard]] bool labeled() const { return values.rows() > 0; }
    [[nodiscard]] int dim() const { return static_cast<int>(coords.rows()); }
};

/// Labels for a point: one value per network output.
using Labeler = std::function<std::vector<double>(std::span<const double>)>;

/// n i.i.d. uniform points strictly inside the spatial domain, with t in (0, T] for
/// time-dependent families.
[[nodiscard]] PointSet sample_interior(const problems::PdeInstance &inst, Eigen::Index n, std::uint64_t seed);

/// Boundary points with their prescribed values:
///  poisson1d   alternates the two endpoints (n = 2 gives both), labeled with the exact solution;
///  poisson2d   uniform on the four edges, labeled 0;
///  burgers     x = -1 or 1 with uniform t, labeled 0;
///  schrodinger matched periodic pairs (t, -5), (t, 5) at columns 2i, 2i+1, unlabeled; n must be even.
[[nodiscard]] PointSet sample_boundary(const problems::PdeInstance &inst, Eigen::Index n, std::uint64_t seed);

/// t = 0 line with the initial condition as labels; time-dependent families only.
[[nodiscard]] PointSet sample_initial(const problems::PdeInstance &inst, Eigen::Index n, std::uint64_t seed);

/// Interior points labeled by `labels`.
[[nodiscard]] PointSet sample_data(const problems::PdeInstance &inst, Eigen::Index n, std::uint64_t seed,
                                   const Labeler &labels);

/// Labels become y + pct * std(y) * N(0,1), with std taken per label row over the set.
[[nodiscard]] PointSet add_noise(const PointSet &set, double pct, std::uint64_t seed);

/// Header: coordinate names then value names; 17 significant digits.
void write_csv(const std::filesystem::path &path, const PointSet &set, const std::vector<std::string> &coord_names,
               const std::vector<std::string> &value_names);
/// Reads a file written by write_csv: the first `dim` columns are coordinates, the rest labels.
[[nodiscard]] PointSet read_csv(const std::filesystem::path &path, int dim, Role role);

/// Column names used in CSV artifacts: (x), (x, y) or (x, t); values (u) or (u, v).
[[nodiscard]] std::vector<std::string> coordinate_names(problems::Family f);
[[nodiscard]] std::vector<std::string> value_names(problems::Family f);

}  // namespace nrpinn::sampler

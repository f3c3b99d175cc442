#pragma once

#include "nrpinn/problems/pde.hpp"

#include <complex>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace nrpinn::problems {

/// Gauss-Hermite nodes and weights for the weight exp(-s^2), nodes ascending.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};
[[nodiscard]] GaussHermite gauss_hermite(int n);

/// Viscous Burgers solution from the Cole-Hopf transform: the heat-kernel integrals
/// are evaluated by Gauss-Hermite quadrature after substituting eta = sqrt(4 nu t) s.
class BurgersColeHopf {
  public:
    /// Throws UnsupportedError for nu <= 0 and ConfigError for fewer than 2 nodes.
    explicit BurgersColeHopf(double nu, int nodes = 100);

    /// t = 0 returns -sin(pi x) directly.
    [[nodiscard]] double operator()(double x, double t) const;
    [[nodiscard]] double nu() const { return nu_; }

  private:
    double nu_;
    GaussHermite rule_;
};

[[nodiscard]] double oracle_burgers_cole_hopf(double x, double t, double nu, int nodes = 100);

/// Values on a tensor grid: value(i, j) at (xs[i], ys[j]); ys is y or t.
struct Grid2d {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> values;  // i-major: values[i * ys.size() + j]

    [[nodiscard]] double &at(std::size_t i, std::size_t j) { return values[i * ys.size() + j]; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * ys.size() + j]; }
    /// Bilinear interpolation; points outside the grid are clamped to its hull.
    [[nodiscard]] double interpolate(double x, double y) const;
};

/// Writes rows "x,<y_name>,value" with 17 significant digits.
void write_grid_csv(const std::filesystem::path &path, const Grid2d &grid, std::string_view y_name);

struct Poisson2dFdOptions {
    double tolerance = 1e-10;  // on ||r|| / ||b||
    int max_iterations = 0;    // 0: 20 * grid_n
};

/// 5-point finite differences for -Laplace(u) = f on [0,1]^2 with u = 0 on the boundary,
/// solved by conjugate gradients. grid_n is the number of intervals per side, so the result
/// has (grid_n + 1)^2 nodes including the boundary. Throws NumericError on non-convergence.
[[nodiscard]] Grid2d oracle_poisson2d_fd(const std::vector<HeatSource> &sources, int grid_n,
                                         const Poisson2dFdOptions &opts = {});

struct SchrodingerOptions {
    int modes = 256;         // periodic grid on [-5, 5)
    int snapshots = 201;     // equally spaced times in [0, pi/2], both ends included
    double step_tol = 1e-8;  // max-norm change of the final field when the step is halved
    double drift_tol = 1e-6; // relative change of the discrete mass that counts as unstable
    int max_doublings = 14;
};

/// Split-step Fourier (Strang) solution of i h_t + lambda h_xx + |h|^2 h = 0 from h(0,x) = 2 sech(x).
struct SchrodingerSolution {
    double lambda = 0.5;
    std::vector<double> xs;                             // modes points, x_j = -5 + 10 j / modes
    std::vector<double> ts;                             // snapshot times
    std::vector<std::vector<std::complex<double>>> h;   // h[k][j] at (ts[k], xs[j])
    std::size_t steps = 0;                              // time steps of the accepted run

    /// Discrete mass h_x * sum |h|^2 at snapshot k.
    [[nodiscard]] double mass(std::size_t k) const;
    /// Trigonometric interpolation at any x (periodic in x with period 10).
    [[nodiscard]] std::complex<double> at(std::size_t k, double x) const;
    /// |h| on the (x, t) snapshot grid.
    [[nodiscard]] Grid2d modulus_grid() const;
};

/// Throws NumericError when the mass drifts beyond drift_tol or the step refinement
/// does not settle within max_doublings.
[[nodiscard]] SchrodingerSolution oracle_schrodinger_spectral(double lambda, const SchrodingerOptions &opts = {});

}  // namespace nrpinn::problems

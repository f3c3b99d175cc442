#pragma once

#include "nrpinn/network/mlp.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nrpinn::kernels {

/// Input coordinates that carry derivatives, and which of them also need the pure second one.
struct Tracking {
    std::vector<int> dims;
    std::vector<bool> second;

    static Tracking none() { return {}; }
    static Tracking first_order(std::vector<int> dims);
    static Tracking with_second(std::vector<int> dims, std::vector<bool> second);

    [[nodiscard]] int dir_count() const { return static_cast<int>(dims.size()); }
    [[nodiscard]] int second_count() const;
    /// Columns per point in the stacked layout: value, d1 per dim, d2 per second-order dim.
    [[nodiscard]] int component_count() const { return 1 + dir_count() + second_count(); }
    /// Throws ConfigError for inconsistent or out-of-range entries.
    void validate(int input_dim) const;
};

/// Network output jets for a set of points; every matrix is outputs x points.
/// d2[k] is empty when tracking.second[k] is false.
struct OutputJets {
    Eigen::MatrixXd value;
    std::vector<Eigen::MatrixXd> d1;
    std::vector<Eigen::MatrixXd> d2;

    static OutputJets zeros(int outputs, Eigen::Index points, const Tracking &tracking);
    [[nodiscard]] Eigen::Index points() const { return value.cols(); }
};

/// Points are columns: input_dim x n.
using Points = Eigen::MatrixXd;

/// Contiguous slice of a point set handed to a loss head.
struct BlockView {
    Eigen::Index first = 0;
    const Points *points = nullptr;  // full set; columns [first, first + jets.points())
    const OutputJets *jets = nullptr;
};

/// Loss head: returns the loss contribution of one block, writes d(loss)/d(jets) into
/// `adjoint` (pre-sized like the block's jets) and adds d(loss)/d(param) for parameters it
/// reads directly (such as a trainable PDE coefficient) into `direct_grad`.
/// Heads only see whole blocks; blocks have even length so consecutive pairs stay together.
using LossHead = std::function<double(const BlockView &block, OutputJets &adjoint, std::span<double> direct_grad)>;

enum class Backend {
    reference,  ///< per-point scalar loops, single thread
    openmp,     ///< blocked matrix kernels, one OpenMP task per block
};

/// Points per block for the openmp backend. Results do not depend on the thread count:
/// every block reduces into its own buffer and buffers are summed in block order.
inline constexpr Eigen::Index kBlockSize = 256;

[[nodiscard]] OutputJets forward(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
                                 const Tracking &tracking, Backend backend = Backend::openmp);

/// Loss = sum of head contributions over blocks. `grad` (length params.size()) is overwritten.
double value_and_grad(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
                      const Tracking &tracking, const LossHead &head, std::span<double> grad,
                      Backend backend = Backend::openmp);

/// Loss only; the head's adjoint output is ignored.
double value(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
             const Tracking &tracking, const LossHead &head, Backend backend = Backend::openmp);

namespace detail {
OutputJets forward_reference(const net::MlpSpec &, const net::ParamVector &, const Points &, const Tracking &);
double value_and_grad_reference(const net::MlpSpec &, const net::ParamVector &, const Points &, const Tracking &,
                                const LossHead &, std::span<double>, bool want_grad);
OutputJets forward_openmp(const net::MlpSpec &, const net::ParamVector &, const Points &, const Tracking &);
double value_and_grad_openmp(const net::MlpSpec &, const net::ParamVector &, const Points &, const Tracking &,
                             const LossHead &, std::span<double>, bool want_grad);
}  // namespace detail

}  // namespace nrpinn::kernels

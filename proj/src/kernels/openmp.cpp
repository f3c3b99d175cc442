// Blocked jet kernels: each block of points is propagated as one stacked matrix
// [value | d1... | d2...] per layer, so every layer costs one GEMM forward and two backward.
#include "nrpinn/errors.hpp"
#include "nrpinn/kernels/jets.hpp"

#include <Eigen/Dense>

#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nrpinn::kernels::detail {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMajor>;
using GradWeights = Eigen::Map<RowMajor>;

struct Layout {
    int comps = 1;
    int dirs = 0;
    std::vector<int> second_slot;

    explicit Layout(const Tracking &t) : dirs(t.dir_count()) {
        comps = 1 + dirs;
        for (int k = 0; k < dirs; ++k) {
            second_slot.push_back(t.second[k] ? comps++ : -1);
        }
    }
};

struct LayerCache {
    Eigen::MatrixXd z;   // rows x (comps * B), unscaled pre-activation
    Eigen::MatrixXd a;   // rows x (comps * B), layer output
    Eigen::ArrayXXd s1;  // rows x B, activation derivatives at the scaled value
    Eigen::ArrayXXd s2;
    Eigen::ArrayXXd s3;
};

struct Workspace {
    Eigen::MatrixXd input;  // in x (comps * B)
    std::vector<LayerCache> layers;
    Eigen::MatrixXd zbar;
    Eigen::MatrixXd abar;
};

// tanh via one vectorized exp; |error| stays at the rounding level of the inputs.
void tanh_derivs(const Eigen::ArrayXXd &s, LayerCache &c, bool third) {
    const Eigen::ArrayXXd e = (2.0 * s.max(-20.0).min(20.0)).exp();
    const Eigen::ArrayXXd t = (e - 1.0) / (e + 1.0);
    c.s1 = 1.0 - t.square();
    c.s2 = -2.0 * t * c.s1;
    if (third) {
        c.s3 = c.s1 * (4.0 * t.square() - 2.0 * c.s1);
    }
    c.a.leftCols(s.cols()) = t.matrix();
}

void sin_derivs(const Eigen::ArrayXXd &s, LayerCache &c, bool third) {
    const Eigen::ArrayXXd sn = s.sin();
    c.s1 = s.cos();
    c.s2 = -sn;
    if (third) {
        c.s3 = -c.s1;
    }
    c.a.leftCols(s.cols()) = sn.matrix();
}

class BlockedNet {
  public:
    BlockedNet(const net::MlpSpec &spec, const net::ParamVector &params, const Tracking &tracking)
        : spec_(spec), params_(params), tracking_(tracking), lay_(tracking) {
        slope_ = spec.adaptive_slope ? spec.slope_scale * params.slot(net::kSlopeSlot) : 1.0;
        const auto w = params.values();
        for (const auto &shape : params.layers()) {
            // Owned copies: GEMM rounding depends on operand alignment, so results would
            // otherwise vary with where the parameter vector happens to be allocated.
            weights_.emplace_back(ConstWeights(w.data() + shape.weight_offset, shape.rows, shape.cols));
            biases_.emplace_back(Eigen::Map<const Eigen::VectorXd>(w.data() + shape.bias_offset, shape.rows));
        }
    }

    [[nodiscard]] const Layout &layout() const { return lay_; }

    void forward(const Points &points, Eigen::Index first, Eigen::Index count, Workspace &ws,
                 bool keep_third) const {
        const int C = lay_.comps;
        const Eigen::Index B = count;
        ws.input.setZero(spec_.input_dim(), C * B);
        ws.input.leftCols(B) = points.middleCols(first, B);
        for (int k = 0; k < lay_.dirs; ++k) {
            ws.input.block(tracking_.dims[k], (1 + k) * B, 1, B).setOnes();
        }
        ws.layers.resize(weights_.size());
        const Eigen::MatrixXd *prev = &ws.input;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            LayerCache &c = ws.layers[l];
            c.z.noalias() = weights_[l] * (*prev);
            c.z.leftCols(B).colwise() += biases_[l];
            if (l + 1 == weights_.size()) {
                break;
            }
            c.a.resize(c.z.rows(), C * B);
            const Eigen::ArrayXXd sv = slope_ * c.z.leftCols(B).array();
            if (spec_.activation == net::Activation::tanh) {
                tanh_derivs(sv, c, keep_third);
            } else {
                sin_derivs(sv, c, keep_third);
            }
            for (int k = 0; k < lay_.dirs; ++k) {
                const auto s1k = slope_ * c.z.middleCols((1 + k) * B, B).array();
                c.a.middleCols((1 + k) * B, B) = (c.s1 * s1k).matrix();
                if (lay_.second_slot[k] >= 0) {
                    const int q = lay_.second_slot[k];
                    const auto s2k = slope_ * c.z.middleCols(q * B, B).array();
                    c.a.middleCols(q * B, B) = (c.s2 * s1k.square() + c.s1 * s2k).matrix();
                }
            }
            prev = &c.a;
        }
    }

    void extract(const Workspace &ws, Eigen::Index B, OutputJets &jets) const {
        const Eigen::MatrixXd &out = ws.layers.back().z;
        jets.value = out.leftCols(B);
        for (int k = 0; k < lay_.dirs; ++k) {
            jets.d1[k] = out.middleCols((1 + k) * B, B);
            if (lay_.second_slot[k] >= 0) {
                jets.d2[k] = out.middleCols(lay_.second_slot[k] * B, B);
            }
        }
    }

    void copy_into(const Workspace &ws, Eigen::Index first, Eigen::Index B, OutputJets &jets) const {
        const Eigen::MatrixXd &out = ws.layers.back().z;
        jets.value.middleCols(first, B) = out.leftCols(B);
        for (int k = 0; k < lay_.dirs; ++k) {
            jets.d1[k].middleCols(first, B) = out.middleCols((1 + k) * B, B);
            if (lay_.second_slot[k] >= 0) {
                jets.d2[k].middleCols(first, B) = out.middleCols(lay_.second_slot[k] * B, B);
            }
        }
    }

    /// Adds d(<adjoint, jets>)/d(params) for the block held in `ws` into `grad`.
    void backward(const OutputJets &adjoint, Eigen::Index B, Workspace &ws, std::span<double> grad) const {
        const int C = lay_.comps;
        ws.zbar.resize(spec_.output_dim(), C * B);
        ws.zbar.leftCols(B) = adjoint.value;
        for (int k = 0; k < lay_.dirs; ++k) {
            ws.zbar.middleCols((1 + k) * B, B) = adjoint.d1[k];
            if (lay_.second_slot[k] >= 0) {
                ws.zbar.middleCols(lay_.second_slot[k] * B, B) = adjoint.d2[k];
            }
        }
        const auto &shapes = params_.layers();
        double cbar = 0.0;
        for (std::size_t l = weights_.size(); l-- > 0;) {
            const Eigen::MatrixXd &prev = l == 0 ? ws.input : ws.layers[l - 1].a;
            GradWeights gw(grad.data() + shapes[l].weight_offset, shapes[l].rows, shapes[l].cols);
            gw.noalias() += ws.zbar * prev.transpose();
            Eigen::Map<Eigen::VectorXd> gb(grad.data() + shapes[l].bias_offset, shapes[l].rows);
            gb += ws.zbar.leftCols(B).rowwise().sum();
            if (l == 0) {
                break;
            }
            ws.abar.noalias() = weights_[l].transpose() * ws.zbar;

            const LayerCache &c = ws.layers[l - 1];
            ws.zbar.resize(ws.abar.rows(), C * B);
            auto sbv = ws.zbar.leftCols(B).array();
            sbv = ws.abar.leftCols(B).array() * c.s1;
            for (int k = 0; k < lay_.dirs; ++k) {
                const auto s1k = slope_ * c.z.middleCols((1 + k) * B, B).array();
                const auto ab1 = ws.abar.middleCols((1 + k) * B, B).array();
                auto sb1 = ws.zbar.middleCols((1 + k) * B, B).array();
                sb1 = ab1 * c.s1;
                sbv += ab1 * c.s2 * s1k;
                if (lay_.second_slot[k] >= 0) {
                    const int q = lay_.second_slot[k];
                    const auto s2k = slope_ * c.z.middleCols(q * B, B).array();
                    const auto ab2 = ws.abar.middleCols(q * B, B).array();
                    ws.zbar.middleCols(q * B, B).array() = ab2 * c.s1;
                    sb1 += 2.0 * ab2 * c.s2 * s1k;
                    sbv += ab2 * (c.s3 * s1k.square() + c.s2 * s2k);
                }
            }
            if (spec_.adaptive_slope) {
                cbar += (ws.zbar.array() * c.z.array()).sum();
            }
            if (slope_ != 1.0) {
                ws.zbar *= slope_;
            }
        }
        if (spec_.adaptive_slope) {
            grad[*params_.slot_index(net::kSlopeSlot)] += spec_.slope_scale * cbar;
        }
    }

  private:
    const net::MlpSpec &spec_;
    const net::ParamVector &params_;
    const Tracking &tracking_;
    Layout lay_;
    double slope_ = 1.0;
    std::vector<RowMajor> weights_;
    std::vector<Eigen::VectorXd> biases_;
};

Eigen::Index block_count(Eigen::Index n) { return (n + kBlockSize - 1) / kBlockSize; }

}  // namespace

OutputJets forward_openmp(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
                          const Tracking &tracking) {
    const BlockedNet net(spec, params, tracking);
    OutputJets jets = OutputJets::zeros(spec.output_dim(), points.cols(), tracking);
    const Eigen::Index n = points.cols();
    const Eigen::Index nb = block_count(n);
#pragma omp parallel
    {
        Workspace ws;
#pragma omp for schedule(static)
        for (Eigen::Index b = 0; b < nb; ++b) {
            const Eigen::Index first = b * kBlockSize;
            const Eigen::Index count = std::min(kBlockSize, n - first);
            net.forward(points, first, count, ws, false);
            net.copy_into(ws, first, count, jets);
        }
    }
    return jets;
}

double value_and_grad_openmp(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
                             const Tracking &tracking, const LossHead &head, std::span<double> grad,
                             bool want_grad) {
    const BlockedNet net(spec, params, tracking);
    const Eigen::Index n = points.cols();
    const Eigen::Index nb = block_count(n);
    std::vector<double> block_loss(nb, 0.0);
    // Eigen-owned buffers keep a fixed alignment, so the GEMM accumulation order never changes
    // between calls.
    std::vector<Eigen::VectorXd> block_grad(nb);
    std::exception_ptr failure;

#pragma omp parallel
    {
        Workspace ws;
        OutputJets jets = OutputJets::zeros(spec.output_dim(), 0, tracking);
        OutputJets adjoint = jets;
#pragma omp for schedule(dynamic)
        for (Eigen::Index b = 0; b < nb; ++b) {
            try {
                const Eigen::Index first = b * kBlockSize;
                const Eigen::Index count = std::min(kBlockSize, n - first);
                net.forward(points, first, count, ws, want_grad);
                net.extract(ws, count, jets);
                adjoint = OutputJets::zeros(spec.output_dim(), count, tracking);
                auto &g = block_grad[b];
                g.setZero(static_cast<Eigen::Index>(params.size()));
                const std::span<double> gs(g.data(), params.size());
                block_loss[b] = head(BlockView{first, &points, &jets}, adjoint, gs);
                if (want_grad) {
                    net.backward(adjoint, count, ws, gs);
                }
            } catch (...) {
#pragma omp critical(nrpinn_kernel_failure)
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    double loss = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (Eigen::Index b = 0; b < nb; ++b) {
        loss += block_loss[b];
        if (want_grad) {
            const auto &g = block_grad[b];
            for (std::size_t i = 0; i < grad.size(); ++i) {
                grad[i] += g[i];
            }
        }
    }
    return loss;
}

}  // namespace nrpinn::kernels::detail

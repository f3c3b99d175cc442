// Serial per-point implementation of the jet kernels. Kept as the readable baseline that
// the blocked OpenMP kernels are tested and benchmarked against.
#include "nrpinn/kernels/jets.hpp"

#include <cmath>
#include <vector>

namespace nrpinn::kernels::detail {

namespace {

// Component layout per neuron: [value, d1 for each dir, d2 for each second-order dir].
struct Layout {
    int comps = 1;
    int dirs = 0;
    std::vector<int> second_slot;  // per dir, component index of d2 or -1

    explicit Layout(const Tracking &t) : dirs(t.dir_count()) {
        comps = 1 + dirs;
        for (int k = 0; k < dirs; ++k) {
            second_slot.push_back(t.second[k] ? comps++ : -1);
        }
    }
};

struct Derivs {
    double t, s1, s2, s3;
};

Derivs activation(net::Activation act, double s) {
    if (act == net::Activation::tanh) {
        const double t = std::tanh(s);
        const double s1 = 1.0 - t * t;
        return {t, s1, -2.0 * t * s1, -2.0 * s1 * s1 + 4.0 * t * t * s1};
    }
    const double sn = std::sin(s);
    const double cs = std::cos(s);
    return {sn, cs, -sn, -cs};
}

struct PointState {
    std::vector<std::vector<double>> z;  // per layer, rows * comps (pre-activation, unscaled)
    std::vector<std::vector<double>> a;  // per layer output, rows * comps; a[0] is the input
};

double slope_factor(const net::MlpSpec &spec, const net::ParamVector &params) {
    return spec.adaptive_slope ? spec.slope_scale * params.slot(net::kSlopeSlot) : 1.0;
}

void forward_point(const net::MlpSpec &spec, const net::ParamVector &params, const Layout &lay,
                   const Tracking &tracking, const double *x, PointState &st) {
    const auto &layers = params.layers();
    const auto w = params.values();
    const int C = lay.comps;
    const double c = slope_factor(spec, params);
    st.z.resize(layers.size());
    st.a.resize(layers.size() + 1);
    st.a[0].assign(static_cast<std::size_t>(spec.input_dim()) * C, 0.0);
    for (int i = 0; i < spec.input_dim(); ++i) {
        st.a[0][i * C] = x[i];
    }
    for (int k = 0; k < lay.dirs; ++k) {
        st.a[0][tracking.dims[k] * C + 1 + k] = 1.0;
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto &shape = layers[l];
        const auto &in = st.a[l];
        auto &z = st.z[l];
        z.assign(static_cast<std::size_t>(shape.rows) * C, 0.0);
        for (int r = 0; r < shape.rows; ++r) {
            for (int j = 0; j < shape.cols; ++j) {
                const double wij = w[shape.weight_offset + static_cast<std::size_t>(r) * shape.cols + j];
                for (int q = 0; q < C; ++q) {
                    z[r * C + q] += wij * in[j * C + q];
                }
            }
            z[r * C] += w[shape.bias_offset + r];
        }
        auto &out = st.a[l + 1];
        if (l + 1 == layers.size()) {
            out = z;
            break;
        }
        out.assign(z.size(), 0.0);
        for (int r = 0; r < shape.rows; ++r) {
            const double *zr = &z[r * C];
            double *ar = &out[r * C];
            const Derivs d = activation(spec.activation, c * zr[0]);
            ar[0] = d.t;
            for (int k = 0; k < lay.dirs; ++k) {
                const double s1k = c * zr[1 + k];
                ar[1 + k] = d.s1 * s1k;
                if (lay.second_slot[k] >= 0) {
                    const int q = lay.second_slot[k];
                    ar[q] = d.s2 * s1k * s1k + d.s1 * c * zr[q];
                }
            }
        }
    }
}

void store_outputs(const Layout &lay, const std::vector<double> &out, int outputs, Eigen::Index col,
                   OutputJets &jets) {
    for (int o = 0; o < outputs; ++o) {
        jets.value(o, col) = out[o * lay.comps];
        for (int k = 0; k < lay.dirs; ++k) {
            jets.d1[k](o, col) = out[o * lay.comps + 1 + k];
            if (lay.second_slot[k] >= 0) {
                jets.d2[k](o, col) = out[o * lay.comps + lay.second_slot[k]];
            }
        }
    }
}

}  // namespace

OutputJets forward_reference(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
                             const Tracking &tracking) {
    const Layout lay(tracking);
    OutputJets jets = OutputJets::zeros(spec.output_dim(), points.cols(), tracking);
    PointState st;
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        forward_point(spec, params, lay, tracking, points.col(i).data(), st);
        store_outputs(lay, st.a.back(), spec.output_dim(), i, jets);
    }
    return jets;
}

double value_and_grad_reference(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
                                const Tracking &tracking, const LossHead &head, std::span<double> grad,
                                bool want_grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const OutputJets jets = forward_reference(spec, params, points, tracking);
    OutputJets adjoint = OutputJets::zeros(spec.output_dim(), points.cols(), tracking);
    std::vector<double> direct(params.size(), 0.0);
    const double loss = head(BlockView{0, &points, &jets}, adjoint, direct);
    if (!want_grad) {
        return loss;
    }

    const Layout lay(tracking);
    const int C = lay.comps;
    const auto &layers = params.layers();
    const auto w = params.values();
    const double c = slope_factor(spec, params);
    double cbar = 0.0;
    PointState st;
    std::vector<double> zbar;
    std::vector<double> abar;
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        forward_point(spec, params, lay, tracking, points.col(i).data(), st);
        zbar.assign(static_cast<std::size_t>(spec.output_dim()) * C, 0.0);
        for (int o = 0; o < spec.output_dim(); ++o) {
            zbar[o * C] = adjoint.value(o, i);
            for (int k = 0; k < lay.dirs; ++k) {
                zbar[o * C + 1 + k] = adjoint.d1[k](o, i);
                if (lay.second_slot[k] >= 0) {
                    zbar[o * C + lay.second_slot[k]] = adjoint.d2[k](o, i);
                }
            }
        }
        for (std::size_t l = layers.size(); l-- > 0;) {
            const auto &shape = layers[l];
            const auto &in = st.a[l];
            for (int r = 0; r < shape.rows; ++r) {
                for (int j = 0; j < shape.cols; ++j) {
                    double acc = 0.0;
                    for (int q = 0; q < C; ++q) {
                        acc += zbar[r * C + q] * in[j * C + q];
                    }
                    grad[shape.weight_offset + static_cast<std::size_t>(r) * shape.cols + j] += acc;
                }
                grad[shape.bias_offset + r] += zbar[r * C];
            }
            if (l == 0) {
                break;
            }
            abar.assign(static_cast<std::size_t>(shape.cols) * C, 0.0);
            for (int r = 0; r < shape.rows; ++r) {
                for (int j = 0; j < shape.cols; ++j) {
                    const double wij = w[shape.weight_offset + static_cast<std::size_t>(r) * shape.cols + j];
                    for (int q = 0; q < C; ++q) {
                        abar[j * C + q] += wij * zbar[r * C + q];
                    }
                }
            }
            // Through the hidden activation of layer l-1.
            const auto &z = st.z[l - 1];
            zbar.assign(abar.size(), 0.0);
            for (int r = 0; r < shape.cols; ++r) {
                const double *zr = &z[r * C];
                const double *ab = &abar[r * C];
                double *sb = &zbar[r * C];
                const Derivs d = activation(spec.activation, c * zr[0]);
                sb[0] = ab[0] * d.s1;
                for (int k = 0; k < lay.dirs; ++k) {
                    const double s1k = c * zr[1 + k];
                    sb[1 + k] = ab[1 + k] * d.s1;
                    sb[0] += ab[1 + k] * d.s2 * s1k;
                    if (lay.second_slot[k] >= 0) {
                        const int q = lay.second_slot[k];
                        const double s2k = c * zr[q];
                        sb[q] = ab[q] * d.s1;
                        sb[1 + k] += 2.0 * ab[q] * d.s2 * s1k;
                        sb[0] += ab[q] * (d.s3 * s1k * s1k + d.s2 * s2k);
                    }
                }
                for (int q = 0; q < C; ++q) {
                    cbar += sb[q] * zr[q];
                    sb[q] *= c;
                }
            }
        }
    }
    if (spec.adaptive_slope) {
        grad[*params.slot_index(net::kSlopeSlot)] += spec.slope_scale * cbar;
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad[i] += direct[i];
    }
    return loss;
}

}  // namespace nrpinn::kernels::detail

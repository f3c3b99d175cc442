#include "helpers.hpp"

#include "nrpinn/autodiff/eval_jet.hpp"
#include "nrpinn/autodiff/tape.hpp"
#include "nrpinn/errors.hpp"
#include "nrpinn/kernels/jets.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nrpinn;
using namespace testing_helpers;
using kernels::Backend;
using kernels::Tracking;

namespace {

kernels::Points random_points(int dim, Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    kernels::Points p(dim, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (int i = 0; i < dim; ++i) {
            p(i, j) = u(rng);
        }
    }
    return p;
}

// Weight of each jet component in the test residual r = sum_c w_c * component_c.
double w_d1(int k) { return 0.5 - 0.3 * k; }
double w_d2(int k) { return 0.25 + 0.2 * k; }

// Per-point loss: sum over outputs of r^2 + nu * u + sin(u).
template <class T>
T point_loss(const ad::JetBundle<T> &j, const Tracking &tr, int outputs, const T &nu) {
    using std::sin;
    T acc = T(0.0);
    for (int o = 0; o < outputs; ++o) {
        T r = j.value(o);
        for (int k = 0; k < tr.dir_count(); ++k) {
            r = r + w_d1(k) * j.d1(o, tr.dims[k]);
            if (tr.second[k]) {
                r = r + w_d2(k) * j.d2(o, tr.dims[k], tr.dims[k]);
            }
        }
        acc = acc + r * r + nu * j.value(o) + sin(j.value(o));
    }
    return acc;
}

kernels::LossHead make_head(const Tracking &tr, std::size_t nu_index, double nu) {
    return [tr, nu_index, nu](const kernels::BlockView &b, kernels::OutputJets &adj, std::span<double> direct) {
        const auto &j = *b.jets;
        double loss = 0;
        for (Eigen::Index p = 0; p < j.points(); ++p) {
            for (Eigen::Index o = 0; o < j.value.rows(); ++o) {
                const double u = j.value(o, p);
                double r = u;
                for (int k = 0; k < tr.dir_count(); ++k) {
                    r += w_d1(k) * j.d1[k](o, p);
                    if (tr.second[k]) {
                        r += w_d2(k) * j.d2[k](o, p);
                    }
                }
                loss += r * r + nu * u + std::sin(u);
                adj.value(o, p) = 2 * r + nu + std::cos(u);
                for (int k = 0; k < tr.dir_count(); ++k) {
                    adj.d1[k](o, p) = 2 * r * w_d1(k);
                    if (tr.second[k]) {
                        adj.d2[k](o, p) = 2 * r * w_d2(k);
                    }
                }
                direct[nu_index] += u;
            }
        }
        return loss;
    };
}

struct TapeResult {
    double loss;
    std::vector<double> grad;
};

TapeResult tape_oracle(const net::MlpSpec &spec, const net::ParamVector &p, const kernels::Points &pts,
                       const Tracking &tr, std::size_t nu_index) {
    ad::Tape tape;
    auto leaves = tape.variables(p.values());
    ad::Var total = 0.0;
    std::vector<double> x(spec.input_dim());
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
        for (int i = 0; i < spec.input_dim(); ++i) {
            x[i] = pts(i, j);
        }
        const auto bundle = ad::eval_jet<ad::Var>(spec, p, leaves, x, tr.dims);
        total = total + point_loss(bundle, tr, spec.output_dim(), leaves[nu_index]);
    }
    return {total.value(), ad::grad_params(total, leaves)};
}

struct Case {
    const char *name;
    net::MlpSpec spec;
    Tracking tracking;
};

std::vector<Case> cases() {
    return {
        {"1d tanh", {{1, 12, 12, 1}}, Tracking::with_second({0}, {true})},
        {"2d laplacian adaptive", {{2, 10, 10, 1}, net::Activation::tanh, true, 10},
         Tracking::with_second({0, 1}, {true, true})},
        {"space-time sin", {{2, 9, 9, 1}, net::Activation::sin}, Tracking::with_second({0, 1}, {true, false})},
        {"two outputs adaptive sin", {{2, 8, 8, 2}, net::Activation::sin, true, 3},
         Tracking::with_second({0, 1}, {true, false})},
        {"first order only", {{2, 7, 1}}, Tracking::first_order({1})},
        {"no tracking", {{3, 6, 6, 2}}, Tracking::none()},
    };
}

}  // namespace

TEST_CASE("kernels: both backends match the tape oracle") {
    for (const auto &c : cases()) {
        CAPTURE(c.name);
        const auto p = random_params(c.spec, 21, {{std::string(net::kNuSlot), 0.35}});
        const std::size_t nu_index = *p.slot_index(net::kNuSlot);
        const auto pts = random_points(c.spec.input_dim(), 2 * kernels::kBlockSize + 90, 4);
        const auto head = make_head(c.tracking, nu_index, p.slot(net::kNuSlot));
        const auto oracle = tape_oracle(c.spec, p, pts, c.tracking, nu_index);
        for (auto backend : {Backend::reference, Backend::openmp}) {
            std::vector<double> g(p.size());
            const double loss = kernels::value_and_grad(c.spec, p, pts, c.tracking, head, g, backend);
            CHECK(rel_err(loss, oracle.loss) < 1e-11);
            CHECK(max_rel_err(g, oracle.grad) < 1e-10);
            CHECK(kernels::value(c.spec, p, pts, c.tracking, head, backend) == loss);
        }
    }
}

TEST_CASE("kernels: forward jets agree with eval_jet") {
    for (const auto &c : cases()) {
        CAPTURE(c.name);
        const auto p = random_params(c.spec, 8);
        const auto pts = random_points(c.spec.input_dim(), kernels::kBlockSize + 3, 9);
        for (auto backend : {Backend::reference, Backend::openmp}) {
            const auto jets = kernels::forward(c.spec, p, pts, c.tracking, backend);
            double worst = 0;
            std::vector<double> x(c.spec.input_dim());
            for (Eigen::Index j = 0; j < pts.cols(); ++j) {
                for (int i = 0; i < c.spec.input_dim(); ++i) {
                    x[i] = pts(i, j);
                }
                const auto b = ad::eval_jet(c.spec, p, x, c.tracking.dims);
                for (int o = 0; o < c.spec.output_dim(); ++o) {
                    worst = std::max(worst, rel_err(jets.value(o, j), b.value(o)));
                    for (int k = 0; k < c.tracking.dir_count(); ++k) {
                        const int d = c.tracking.dims[k];
                        worst = std::max(worst, rel_err(jets.d1[k](o, j), b.d1(o, d)));
                        if (c.tracking.second[k]) {
                            worst = std::max(worst, rel_err(jets.d2[k](o, j), b.d2(o, d, d)));
                        }
                    }
                }
            }
            CHECK(worst < 1e-12);
        }
    }
}

TEST_CASE("kernels: openmp results are reproducible") {
    const auto c = cases()[1];
    const auto p = random_params(c.spec, 2, {{std::string(net::kNuSlot), 0.1}});
    const auto pts = random_points(2, 1000, 5);
    const auto head = make_head(c.tracking, *p.slot_index(net::kNuSlot), 0.1);
    std::vector<double> g1(p.size()), g2(p.size());
    const double l1 = kernels::value_and_grad(c.spec, p, pts, c.tracking, head, g1);
    const double l2 = kernels::value_and_grad(c.spec, p, pts, c.tracking, head, g2);
    CHECK(l1 == l2);
    CHECK(g1 == g2);
    // same values at a different address
    const net::ParamVector copy = p;
    std::vector<double> g3(p.size());
    CHECK(kernels::value_and_grad(c.spec, copy, pts, c.tracking, head, g3) == l1);
    CHECK(g3 == g1);
}

TEST_CASE("kernels: head exceptions propagate and input checks") {
    const net::MlpSpec spec{{2, 4, 1}};
    const auto p = random_params(spec, 1);
    const auto pts = random_points(2, 600, 1);
    const kernels::LossHead bad = [](const kernels::BlockView &b, kernels::OutputJets &, std::span<double>) -> double {
        if (b.first > 0) {
            throw NumericError("boom", "pde");
        }
        return 0.0;
    };
    std::vector<double> g(p.size());
    CHECK_THROWS_AS(kernels::value_and_grad(spec, p, pts, Tracking::none(), bad, g), NumericError);
    const auto wrong = random_points(3, 4, 1);
    CHECK_THROWS_AS((void)kernels::forward(spec, p, wrong, Tracking::none()), ConfigError);
    std::vector<double> short_grad(p.size() - 1);
    CHECK_THROWS_AS(kernels::value_and_grad(spec, p, pts, Tracking::none(), bad, short_grad), ConfigError);
    CHECK_THROWS_AS((void)kernels::forward(spec, p, pts, Tracking::first_order({2})), ConfigError);
    CHECK_THROWS_AS((void)kernels::forward(spec, p, pts, Tracking::first_order({0, 0})), ConfigError);
}

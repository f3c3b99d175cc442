// Reference vs OpenMP kernels on the network shapes used by the experiments.
#include "nrpinn/kernels/jets.hpp"
#include "nrpinn/util/alloc.hpp"
#include "nrpinn/network/init.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace nrpinn;

namespace {

struct Shape {
    std::vector<int> widths;
    kernels::Tracking tracking;
};

Shape shape(int which) {
    switch (which) {
    case 0:  // 1-D Poisson: u_xx
        return {{1, 50, 50, 50, 50, 1}, kernels::Tracking::with_second({0}, {true})};
    case 1:  // 2-D Poisson: u_xx + u_yy
        return {{2, 40, 40, 40, 40, 1}, kernels::Tracking::with_second({0, 1}, {true, true})};
    case 2:  // Burgers: u_t, u_x, u_xx
        return {{2, 20, 20, 20, 20, 20, 20, 20, 20, 1}, kernels::Tracking::with_second({0, 1}, {true, false})};
    default:  // Schrodinger: two outputs, h_t, h_x, h_xx
        return {{2, 100, 100, 100, 100, 2}, kernels::Tracking::with_second({0, 1}, {true, false})};
    }
}

void run(benchmark::State &state, kernels::Backend backend) {
    const Shape s = shape(static_cast<int>(state.range(0)));
    const Eigen::Index n = state.range(1);
    const net::MlpSpec spec{s.widths};
    const auto params = net::init(spec, net::InitScheme::xavier(), 1);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    kernels::Points pts(spec.input_dim(), n);
    for (Eigen::Index i = 0; i < pts.size(); ++i) {
        pts.data()[i] = u(rng);
    }
    // mean square of every jet component
    const kernels::LossHead head = [](const kernels::BlockView &b, kernels::OutputJets &adj, std::span<double>) {
        const auto &j = *b.jets;
        double loss = j.value.squaredNorm();
        adj.value = 2 * j.value;
        for (std::size_t k = 0; k < j.d1.size(); ++k) {
            loss += j.d1[k].squaredNorm();
            adj.d1[k] = 2 * j.d1[k];
            if (j.d2[k].size() > 0) {
                loss += j.d2[k].squaredNorm();
                adj.d2[k] = 2 * j.d2[k];
            }
        }
        return loss;
    };
    std::vector<double> grad(params.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::value_and_grad(spec, params, pts, s.tracking, head, grad, backend));
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_reference(benchmark::State &state) { run(state, kernels::Backend::reference); }
void BM_openmp(benchmark::State &state) { run(state, kernels::Backend::openmp); }

void args(benchmark::internal::Benchmark *b) {
    b->ArgNames({"shape", "points"});
    for (int s = 0; s < 4; ++s) {
        b->Args({s, 1024});
    }
    b->Args({2, 4096});
    b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_reference)->Apply(args);
BENCHMARK(BM_openmp)->Apply(args);

int main(int argc, char **argv) {
    nrpinn::util::configure_allocator();
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}

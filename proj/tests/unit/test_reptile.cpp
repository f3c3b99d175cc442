#include "helpers.hpp"

#include "nrpinn/errors.hpp"
#include "nrpinn/network/checkpoint.hpp"
#include "nrpinn/reptile/reptile.hpp"
#include "nrpinn/util/random.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace nrpinn;
using namespace testing_helpers;
using problems::InfoKind;

namespace {

reptile::MetaConfig small_meta() {
    reptile::MetaConfig c;
    c.spec = {{1, 6, 6, 1}};
    c.sweeps = 3;
    c.tasks_per_sweep = 2;
    c.supervised = 1;
    c.inner.steps = 4;
    c.zero_order.budget.labeled = 40;
    c.high_order.budget.interior = 40;
    c.seed = 11;
    return c;
}

net::ParamVector start_of(const reptile::MetaConfig &c) {
    return net::init(c.spec, c.start, util::derive_seed(c.seed, "start"));
}

}  // namespace

TEST_CASE("reptile: outer update endpoints and affinity") {
    const net::MlpSpec spec{{1, 5, 1}};
    const auto a = random_params(spec, 1);
    const auto b = random_params(spec, 2);
    CHECK(reptile::reptile_outer_update(a, b, 0.0) == a);
    CHECK(reptile::reptile_outer_update(a, b, 1.0) == b);
    for (double eps : {0.1, 0.37, 0.9}) {
        const auto u = reptile::reptile_outer_update(a, b, eps);
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double step = eps * (b.values()[i] - a.values()[i]);
            CHECK(std::abs((u.values()[i] - a.values()[i]) - step) <=
                  4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a.values()[i]), std::abs(step)));
        }
    }
    CHECK_THROWS_AS((void)reptile::reptile_outer_update(a, random_params({{1, 4, 1}}, 2), 0.5), ConfigError);
}

TEST_CASE("reptile: epsilon schedule") {
    CHECK(reptile::epsilon_schedule(0.7, 0, 10) == 0.7);
    CHECK(reptile::epsilon_schedule(1.0, 99, 100) == doctest::Approx(0.01).epsilon(1e-14));
    const int n = 25;
    double prev = reptile::epsilon_schedule(0.8, 0, n);
    double prev_diff = 0;
    for (int i = 1; i < n; ++i) {
        const double e = reptile::epsilon_schedule(0.8, i, n);
        CHECK(e < prev);
        CHECK(e > 0);
        if (i > 1) {
            CHECK(std::abs((e - prev) - prev_diff) < 1e-15);
        }
        prev_diff = e - prev;
        prev = e;
    }
    CHECK_THROWS_AS((void)reptile::epsilon_schedule(1.0, 10, 10), ConfigError);
    CHECK_THROWS_AS((void)reptile::epsilon_schedule(1.0, -1, 10), ConfigError);
}

TEST_CASE("reptile: inner adaptation examples") {
    const net::MlpSpec spec{{1, 6, 1}};
    const auto theta = random_params(spec, 5);
    auto task = problems::sample_task(problems::TaskDistribution::defaults(InfoKind::high_order,
                                                                           problems::Family::poisson1d),
                                      3);
    reptile::InnerConfig frozen;
    frozen.steps = 5;
    frozen.optimizer.learning_rate = 0.0;
    const auto r0 = reptile::inner_adapt(task, spec, theta, frozen);
    CHECK(r0.params == theta);
    CHECK(r0.loss_start == r0.loss_end);

    // A supervised task labeled by the network itself has zero loss and zero gradient.
    problems::Task self;
    self.kind = InfoKind::zero_order;
    self.instance = problems::Poisson1d{};
    self.labeled.role = sampler::Role::data;
    self.labeled.coords = sampler::sample_interior(self.instance, 50, 4).coords;
    self.labeled.values = kernels::forward(spec, theta, self.labeled.coords, kernels::Tracking::none()).value;
    reptile::InnerConfig inner;
    inner.steps = 10;
    const auto r1 = reptile::inner_adapt(self, spec, theta, inner);
    CHECK(r1.loss_start == 0.0);
    CHECK(max_rel_err(r1.params.values(), theta.values()) < 1e-12);
}

TEST_CASE("reptile: one Adam step on a two-parameter task") {
    // u = w x + b on labels y at x; dL/dw = mean 2 (u - y) x, dL/db = mean 2 (u - y).
    const net::MlpSpec spec{{1, 1}};
    auto theta = net::ParamVector(spec);
    theta.values()[0] = 0.5;
    theta.values()[1] = -0.25;
    const std::vector<double> xs{-1.0, 0.5, 2.0};
    const std::vector<double> ys{1.0, 0.0, 3.0};
    problems::Task t;
    t.kind = InfoKind::zero_order;
    t.instance = problems::Poisson1d{};
    t.labeled.role = sampler::Role::data;
    t.labeled.coords.resize(1, 3);
    t.labeled.values.resize(1, 3);
    double gw = 0;
    double gb = 0;
    for (int i = 0; i < 3; ++i) {
        t.labeled.coords(0, i) = xs[i];
        t.labeled.values(0, i) = ys[i];
        const double r = 0.5 * xs[i] - 0.25 - ys[i];
        gw += 2 * r * xs[i] / 3;
        gb += 2 * r / 3;
    }
    reptile::InnerConfig inner;
    inner.steps = 1;
    inner.optimizer.learning_rate = 0.01;
    const auto r = reptile::inner_adapt(t, spec, theta, inner);
    // Bias-corrected moments at t = 1 are g and g^2.
    CHECK(r.params.values()[0] == doctest::Approx(0.5 - 0.01 * gw / (std::abs(gw) + 1e-8)).epsilon(1e-13));
    CHECK(r.params.values()[1] == doctest::Approx(-0.25 - 0.01 * gb / (std::abs(gb) + 1e-8)).epsilon(1e-13));
}

TEST_CASE("reptile: single task single SGD step equals a scaled gradient step") {
    for (auto kind : {InfoKind::zero_order, InfoKind::high_order}) {
        for (double eps0 : {1.0, 0.35}) {
            auto c = small_meta();
            c.sweeps = 1;
            c.tasks_per_sweep = 1;
            c.supervised = kind == InfoKind::zero_order ? 1 : 0;
            c.inner.steps = 1;
            c.eps0 = eps0;
            const double eta = 0.05;
            c.inner.optimizer = {training::OptimizerKind::sgd, eta};
            const auto ck = reptile::meta_init(c);

            const auto theta = start_of(c);
            const auto &dist = kind == InfoKind::zero_order ? c.zero_order : c.high_order;
            const auto task = problems::sample_task(dist, util::derive_seed(util::derive_seed(c.seed, "tasks"), 0));
            std::vector<double> g(theta.size());
            (void)training::compute_loss(task.instance, c.spec, theta, reptile::task_sets(task), {}, g);
            double worst = 0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                worst = std::max(worst, std::abs(ck.params.values()[i] - (theta.values()[i] - eps0 * eta * g[i])));
            }
            CHECK(worst < 1e-12);
        }
    }
}

TEST_CASE("reptile: eps0 = 0 leaves the start untouched") {
    auto c = small_meta();
    c.eps0 = 0.0;
    const auto ck = reptile::meta_init(c);
    CHECK(ck.params == start_of(c));
    CHECK(ck.trace.size() == 6);
}

TEST_CASE("reptile: meta_init is reproducible and orders tasks") {
    const auto c = small_meta();
    const auto a = reptile::meta_init(c);
    const auto b = reptile::meta_init(c);
    CHECK(a.params == b.params);
    CHECK(a.digest == b.digest);
    CHECK(a.params != start_of(c));
    REQUIRE(a.trace.size() == 6);
    for (const auto &r : a.trace) {
        CHECK(r.kind == (r.task == 0 ? InfoKind::zero_order : InfoKind::high_order));
        CHECK(r.epsilon == reptile::epsilon_schedule(1.0, r.sweep, 3));
        CHECK_FALSE(r.skipped);
    }
    CHECK(a.counters.zero_order_sampled == 3);
    CHECK(a.counters.high_order_sampled == 3);

    auto other = c;
    other.seed = 12;
    CHECK(other.digest() != c.digest());
    CHECK(reptile::meta_init(other).params != a.params);
}

TEST_CASE("reptile: pure supervised never touches the high-order distribution") {
    auto c = small_meta();
    c.supervised = c.tasks_per_sweep;
    // An unusable high-order distribution proves it is neither validated nor sampled.
    c.high_order.family = problems::Family::schrodinger;
    const auto ck = reptile::meta_init(c);
    CHECK(ck.counters.high_order_sampled == 0);
    CHECK(ck.counters.zero_order_sampled == 6);
}

TEST_CASE("reptile: failing tasks are skipped, a failed sweep is fatal") {
    auto c = small_meta();
    c.inner.steps = 3;
    c.inner.optimizer = {training::OptimizerKind::sgd, 1e250};
    CHECK_THROWS_AS((void)reptile::meta_init(c), NumericError);

    // Only the high-order task blows up when its loss is scaled far beyond the data loss.
    auto d = small_meta();
    d.inner.optimizer = {training::OptimizerKind::sgd, 1e-3};
    d.inner.weights.pde = 1e306;
    d.inner.weights.bc = 1e306;
    const auto ck = reptile::meta_init(d);
    CHECK(ck.counters.skipped == 3);
    for (const auto &r : ck.trace) {
        CHECK(r.skipped == (r.kind == InfoKind::high_order));
    }
}

TEST_CASE("reptile: config validation") {
    auto c = small_meta();
    c.supervised = 3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_meta();
    c.inner.steps = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_meta();
    c.spec = {{2, 4, 1}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_meta();
    c.zero_order.kind = InfoKind::high_order;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("reptile: checkpoint and provenance sidecar") {
    const auto c = small_meta();
    const auto ck = reptile::meta_init(c);
    const auto path = std::filesystem::temp_directory_path() / "nrpinn_meta_test.ckpt";
    reptile::save_meta_checkpoint(path, ck, c);
    CHECK(reptile::read_checkpoint_digest(path) == ck.digest);
    CHECK(net::init(c.spec, net::InitScheme::checkpoint(path.string()), 0) == ck.params);
    std::ifstream csv(path.string() + ".outer_loss.csv");
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) {
        ++rows;
    }
    CHECK(rows == 6);
    CHECK_FALSE(reptile::read_checkpoint_digest(path.string() + ".missing").has_value());
    for (const auto *suffix : {"", ".json", ".outer_loss.csv"}) {
        std::filesystem::remove(path.string() + suffix);
    }
}

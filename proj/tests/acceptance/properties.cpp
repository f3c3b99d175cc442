// Property criteria: derivatives, residuals of exact solutions, Reptile algebra, oracle
// invariants and determinism.

#include "acceptance.hpp"
#include "helpers.hpp"

#include "nrpinn/autodiff/eval_jet.hpp"
#include "nrpinn/cli/commands.hpp"
#include "nrpinn/kernels/jets.hpp"
#include "nrpinn/network/checkpoint.hpp"
#include "nrpinn/problems/oracles.hpp"
#include "nrpinn/reptile/reptile.hpp"
#include "nrpinn/training/loss.hpp"
#include "nrpinn/util/random.hpp"

#include <fmt/core.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace acceptance {
namespace {

using namespace nrpinn;
namespace fs = std::filesystem;
using testing_helpers::fd_gradient;
using testing_helpers::fd_input;
using testing_helpers::max_rel_err;
using testing_helpers::random_params;
using testing_helpers::rel_err;

Outcome a1_derivatives(const Context &) {
    const long cpu0 = cpu_now();
    util::Rng rng(2024);
    double worst_jet = 0;
    double worst_kernel = 0;
    for (int n = 0; n < 20; ++n) {
        const int in = 1 + static_cast<int>(rng.below(2));
        std::vector<int> widths{in};
        const int hidden = 1 + static_cast<int>(rng.below(2));
        for (int h = 0; h < hidden; ++h) {
            widths.push_back(2 + static_cast<int>(rng.below(7)));
        }
        widths.push_back(1);
        const net::MlpSpec spec{widths, n % 2 == 0 ? net::Activation::tanh : net::Activation::sin};
        const auto p = random_params(spec, 100 + n);
        std::vector<double> x(in);
        for (auto &v : x) {
            v = rng.uniform(-1, 1);
        }
        std::vector<int> dims(in);
        for (int d = 0; d < in; ++d) {
            dims[d] = d;
        }
        const auto jet = ad::eval_jet(spec, p, x, dims);
        kernels::Points pts(in, 1);
        for (int d = 0; d < in; ++d) {
            pts(d, 0) = x[d];
        }
        const auto tracking = kernels::Tracking::with_second(dims, std::vector<bool>(in, true));
        const auto kj = kernels::forward(spec, p, pts, tracking);
        for (int d = 0; d < in; ++d) {
            const auto fd = fd_input(spec, p, x, d, 0, 1e-4);
            worst_jet = std::max({worst_jet, rel_err(jet.d1(0, d), fd.d1), rel_err(jet.d2(0, d, d), fd.d2)});
            worst_kernel = std::max({worst_kernel, rel_err(kj.d1[d](0, 0), fd.d1), rel_err(kj.d2[d](0, 0), fd.d2)});
        }
    }

    struct Case {
        const char *name;
        problems::PdeInstance inst;
        net::MlpSpec spec;
        std::vector<net::ExtraSlot> extras;
    };
    const std::vector<Case> cases{
        {"poisson1d", problems::Poisson1d{}, {{1, 8, 8, 1}}, {}},
        {"poisson2d", problems::Poisson2d{{{0.3, 0.6, 2.0}, {0.7, 0.2, -1.0}}}, {{2, 8, 8, 1}}, {}},
        {"burgers", problems::Burgers{}, {{2, 8, 8, 1}, net::Activation::sin}, {}},
        {"burgers_inverse", problems::BurgersInverse{}, {{2, 8, 8, 1}, net::Activation::tanh, true, 10}, {{"nu", 0.004}}},
        {"schrodinger", problems::Schrodinger{}, {{2, 8, 8, 2}}, {}},
    };
    double worst_grad = 0;
    std::string worst_name;
    for (const auto &c : cases) {
        const auto fam = problems::family_of(c.inst);
        training::TrainingSets s;
        s.interior = sampler::sample_interior(c.inst, 12, 1);
        s.boundary = sampler::sample_boundary(c.inst, 6, 2);
        if (problems::domain_of(fam).time_dependent) {
            s.initial = sampler::sample_initial(c.inst, 6, 3);
        }
        if (fam != problems::Family::schrodinger) {
            util::Rng labels(4);
            s.data = sampler::sample_data(c.inst, 8, 5, [&](std::span<const double>) {
                return std::vector<double>{labels.uniform(-1, 1)};
            });
        }
        const auto p = random_params(c.spec, 9, c.extras);
        std::vector<double> g(p.size());
        (void)training::compute_loss(c.inst, c.spec, p, s, {}, g);
        const auto fd = fd_gradient(
            [&](std::span<const double> flat) {
                const auto q = net::ParamVector::unflatten(c.spec, flat, p.extra_names());
                return training::compute_loss(c.inst, c.spec, q, s, {}).total;
            },
            p.flatten(), 1e-5);
        const double e = max_rel_err(g, fd);
        if (e >= worst_grad) {
            worst_grad = e;
            worst_name = c.name;
        }
    }
    const double cpu = cpu_seconds_since(cpu0);
    const bool pass = worst_jet < 1e-5 && worst_kernel < 1e-5 && worst_grad < 1e-4 && cpu < 60;
    return {pass, fmt::format("eval_jet {:.2e}, kernels {:.2e} (< 1e-5); loss gradient {:.2e} at {} (< 1e-4); "
                              "cpu {:.1f} s (< 60)",
                              worst_jet, worst_kernel, worst_grad, worst_name, cpu)};
}

Outcome a2_residuals(const Context &) {
    const problems::PdeInstance poisson = problems::Poisson1d{};
    double worst_p = 0;
    for (int i = 0; i < 1000; ++i) {
        const double x = -10 + 20.0 * (i + 0.5) / 1000;
        problems::Fields<double> f;
        f.u_xx[0] = -0.49 * std::sin(0.7 * x) - 2.25 * std::cos(1.5 * x);
        worst_p = std::max(worst_p, std::abs(problems::residual(poisson, f, std::vector<double>{x}, 0.0)[0]));
    }

    // Local central stencils of the continuous oracle at 512 x 512 interior space-time nodes.
    const double nu = 0.01 / std::numbers::pi;
    const problems::BurgersColeHopf u(nu);
    const double h = 1e-5;
    double worst_b = 0;
    for (int i = 1; i <= 512; ++i) {
        const double x = -1 + 2.0 * i / 513;
        for (int j = 1; j <= 512; ++j) {
            const double t = j / 512.0;
            const double c = u(x, t);
            const double up = u(x + h, t);
            const double um = u(x - h, t);
            const double ut = (u(x, t + h) - u(x, t - h)) / (2 * h);
            const double r = ut + c * (up - um) / (2 * h) - nu * (up - 2 * c + um) / (h * h);
            worst_b = std::max(worst_b, std::abs(r));
        }
    }
    return {worst_p < 1e-12 && worst_b < 1e-3,
            fmt::format("poisson1d max |f| {:.2e} (< 1e-12); burgers max |f| {:.2e} (< 1e-3)", worst_p, worst_b)};
}

Outcome a3_reptile(const Context &ctx) {
    using problems::InfoKind;
    reptile::MetaConfig base;
    base.spec = {{1, 8, 8, 1}};
    base.sweeps = 1;
    base.tasks_per_sweep = 1;
    base.inner.steps = 1;
    base.zero_order.budget.labeled = 64;
    base.high_order.budget.interior = 64;
    base.seed = 31;
    const double eta = 0.05;
    base.inner.optimizer = {training::OptimizerKind::sgd, eta};

    double worst_step = 0;
    for (auto kind : {InfoKind::zero_order, InfoKind::high_order}) {
        for (double eps0 : {1.0, 0.4}) {
            auto c = base;
            c.supervised = kind == InfoKind::zero_order ? 1 : 0;
            c.eps0 = eps0;
            const auto ck = reptile::meta_init(c);
            const auto theta = net::init(c.spec, c.start, util::derive_seed(c.seed, "start"));
            const auto &dist = kind == InfoKind::zero_order ? c.zero_order : c.high_order;
            const auto task = problems::sample_task(dist, util::derive_seed(util::derive_seed(c.seed, "tasks"), 0));
            std::vector<double> g(theta.size());
            (void)training::compute_loss(task.instance, c.spec, theta, reptile::task_sets(task), {}, g);
            for (std::size_t i = 0; i < g.size(); ++i) {
                worst_step =
                    std::max(worst_step, std::abs(ck.params.values()[i] - (theta.values()[i] - eps0 * eta * g[i])));
            }
        }
    }

    // Schedule endpoints, from the function and from a recorded run.
    const int n = 7;
    const double eps0 = 0.6;
    double sched_err = std::abs(reptile::epsilon_schedule(eps0, 0, n) - eps0);
    sched_err = std::max(sched_err, std::abs(reptile::epsilon_schedule(eps0, n - 1, n) - eps0 / n));
    auto traced = base;
    traced.sweeps = n;
    traced.eps0 = eps0;
    traced.inner.steps = 2;
    const auto run = reptile::meta_init(traced);
    sched_err = std::max(sched_err, std::abs(run.trace.front().epsilon - eps0));
    sched_err = std::max(sched_err, std::abs(run.trace.back().epsilon - eps0 / n));

    // eps0 = 0 through meta-train and compare: the checkpoint is the start, and training from
    // it matches training from the start saved directly.
    const fs::path dir = ctx.work_dir / "a3";
    fs::remove_all(dir);
    const std::string ini = R"(
[problem]
family = poisson1d
[network]
widths = 1|8|8|1
[meta]
sweeps = 3
tasks_per_sweep = 2
supervised = 1
inner_steps = 5
eps0 = 0
seed = 4
[meta_zero]
labeled = 64
[meta_high]
interior = 64
[train]
interior = 64
data = 8
iterations = 20
eval_interval = 5
[eval]
nx = 101
)";
    const auto cfg = cli::parse_config(ini, {"output.dir=" + (dir / "meta").string()});
    const auto ck_path = cli::cmd_meta_train(cfg);
    const auto saved = net::load_checkpoint(ck_path.string());
    const auto start = net::init(cfg.meta->spec, cfg.meta->start, util::derive_seed(cfg.meta->seed, "start"));
    const bool same_params = saved.params == start;
    const fs::path start_path = dir / "start.ckpt";
    net::save_checkpoint(start_path.string(), cfg.meta->spec, start);
    const auto cmp = cli::parse_config(ini, {"output.dir=" + (dir / "compare").string(),
                                             "compare.schemes=Meta=checkpoint:" + ck_path.string() +
                                                 "|Start=checkpoint:" + start_path.string()});
    const auto rows = cli::cmd_compare(cmp);
    bool same_history = rows.size() == 2 && rows[0].result.history.rows.size() == rows[1].result.history.rows.size();
    for (std::size_t i = 0; same_history && i < rows[0].result.history.rows.size(); ++i) {
        const auto &a = rows[0].result.history.rows[i];
        const auto &b = rows[1].result.history.rows[i];
        same_history = a.loss.total == b.loss.total && a.mae == b.mae;
    }
    const bool pass = worst_step < 1e-12 && sched_err < 1e-15 && same_params && same_history;
    return {pass, fmt::format("k=1 step {:.2e} (< 1e-12); schedule endpoints {:.1e}; eps0=0 checkpoint {} start, "
                              "training {}",
                              worst_step, sched_err, same_params ? "equals" : "differs from",
                              same_history ? "identical" : "differs")};
}

Outcome a8_oracles(const Context &) {
    const auto sol = problems::oracle_schrodinger_spectral(0.5);
    const double m0 = sol.mass(0);
    double drift = 0;
    for (std::size_t k = 0; k < sol.ts.size(); ++k) {
        drift = std::max(drift, std::abs(sol.mass(k) - m0) / m0);
    }
    const double span = sol.ts.back() - sol.ts.front();

    // Second order: halving h divides the center-value change by about 4.
    const auto src = problems::benchmark_heat_sources();
    const double c64 = problems::oracle_poisson2d_fd(src, 64).interpolate(0.5, 0.5);
    const double c128 = problems::oracle_poisson2d_fd(src, 128).interpolate(0.5, 0.5);
    const double c256 = problems::oracle_poisson2d_fd(src, 256).interpolate(0.5, 0.5);
    const double ratio = (c64 - c128) / (c128 - c256);
    const bool pass = drift < 1e-8 && std::abs(span - std::numbers::pi / 2) < 1e-12 && std::abs(ratio - 4) < 0.4;
    return {pass, fmt::format("schrodinger mass drift {:.2e} over [0, {:.6f}] (< 1e-8); poisson2d refinement ratio "
                              "{:.3f} (4 +- 0.4)",
                              drift, sol.ts.back(), ratio)};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome a9_determinism(const Context &ctx) {
    const fs::path configs = ctx.source_dir / "configs";
    struct Run {
        std::string name;
        std::string command;
        std::string config;
        std::vector<std::string> sets;
    };
    const std::vector<Run> runs{
        {"oracle_poisson1d", "oracle", "poisson1d_solve.ini", {}},
        {"oracle_burgers", "oracle", "burgers_oracle.ini", {}},
        {"meta_train", "meta-train", "poisson1d_meta_semi.ini",
         {"meta.sweeps=2", "meta.inner_steps=10", "meta_zero.labeled=100", "meta_high.interior=100"}},
        {"solve", "solve", "burgers_solve.ini",
         {"train.iterations=20", "train.interior=300", "train.boundary=100", "train.initial=100",
          "train.eval_interval=5"}},
        {"compare", "compare", "poisson1d_compare.ini",
         {"train.iterations=30", "train.eval_interval=10", "compare.schemes=Xavier=xavier|Normal=normal:0.1"}},
        {"inverse", "inverse", "inverse_data10000_noise1.ini",
         {"train.iterations=20", "train.interior=200", "train.data=400", "train.eval_interval=10"}},
    };
    const fs::path root = ctx.work_dir / "a9";
    fs::remove_all(root);
    int files = 0;
    std::vector<std::string> problems_found;
    for (const auto &r : runs) {
        for (const char *rep : {"first", "second"}) {
            const fs::path out = root / r.name / rep;
            std::string cmd = fmt::format("\"{}\" -q {} \"{}\" --set 'output.dir={}'", ctx.cli.string(), r.command,
                                          (configs / r.config).string(), out.string());
            for (const auto &s : r.sets) {
                cmd += " --set '" + s + "'";
            }
            cmd += " > /dev/null";
            if (std::system(cmd.c_str()) != 0) {
                return {false, fmt::format("command failed: {}", cmd)};
            }
        }
        const fs::path a = root / r.name / "first";
        for (const auto &e : fs::recursive_directory_iterator(a)) {
            if (e.path().extension() != ".csv") {
                continue;
            }
            ++files;
            const fs::path b = root / r.name / "second" / fs::relative(e.path(), a);
            if (!fs::exists(b) || slurp(e.path()) != slurp(b)) {
                problems_found.push_back(fs::relative(e.path(), root).string());
            }
        }
    }
    if (problems_found.empty() && files > 0) {
        return {true, fmt::format("{} commands, {} CSV files byte-identical across reruns", runs.size(), files)};
    }
    std::string list;
    for (const auto &p : problems_found) {
        list += " " + p;
    }
    return {false, fmt::format("{} CSV files compared, differing:{}", files, list)};
}

}  // namespace

std::vector<Criterion> property_criteria() {
    return {
        {"A1", "derivative correctness", a1_derivatives},
        {"A2", "residuals of exact solutions", a2_residuals},
        {"A3", "reptile algebra", a3_reptile},
        {"A8", "oracle invariants", a8_oracles},
        {"A9", "determinism", a9_determinism},
    };
}

}  // namespace acceptance

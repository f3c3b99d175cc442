#include "nrpinn/reptile/reptile.hpp"

#include "nrpinn/network/checkpoint.hpp"
#include "nrpinn/util/log.hpp"
#include "nrpinn/util/random.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>

namespace nrpinn::reptile {

using problems::InfoKind;

net::ParamVector reptile_outer_update(const net::ParamVector &theta, const net::ParamVector &theta_tilde, double eps) {
    if (theta.size() != theta_tilde.size() || theta.extra_names() != theta_tilde.extra_names()) {
        throw ConfigError("reptile update: parameter vectors differ in layout");
    }
    if (eps < 0.0 || eps > 1.0) {
        util::warn("reptile step size {} outside [0, 1]", eps);
    }
    net::ParamVector out = theta;
    auto o = out.values();
    const auto t = theta_tilde.values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = std::lerp(o[i], t[i], eps);  // exact at eps = 0 and eps = 1
    }
    return out;
}

double epsilon_schedule(double eps0, int i, int n) {
    if (n < 1 || i < 0 || i >= n) {
        throw ConfigError(fmt::format("epsilon schedule: sweep {} outside [0, {})", i, n));
    }
    return eps0 * (1.0 - static_cast<double>(i) / n);
}

training::TrainingSets task_sets(const problems::Task &task) {
    training::TrainingSets s;
    if (task.kind == InfoKind::zero_order) {
        s.data = task.labeled;
    } else {
        s.interior = task.interior;
        s.boundary = task.boundary;
        s.initial = task.initial;
    }
    return s;
}

InnerResult inner_adapt(const problems::Task &task, const net::MlpSpec &spec, const net::ParamVector &theta,
                        const InnerConfig &cfg) {
    if (cfg.steps < 0) {
        throw ConfigError("inner steps must be nonnegative");
    }
    const auto sets = task_sets(task);
    InnerResult r{theta, 0.0, 0.0};
    training::Optimizer opt(cfg.optimizer, theta.size());
    std::vector<double> grad(theta.size());
    for (int s = 0; s < cfg.steps; ++s) {
        const auto l = training::compute_loss(task.instance, spec, r.params, sets, cfg.weights, grad, cfg.backend);
        if (s == 0) {
            r.loss_start = l.total;
        }
        opt.step(r.params.values(), grad);
    }
    r.loss_end = training::compute_loss(task.instance, spec, r.params, sets, cfg.weights, {}, cfg.backend).total;
    if (cfg.steps == 0) {
        r.loss_start = r.loss_end;
    }
    return r;
}

namespace {

void check_distribution(const problems::TaskDistribution &d, InfoKind want, const net::MlpSpec &spec,
                        const char *which) {
    if (d.kind != want) {
        throw ConfigError(fmt::format("{} distribution has kind {}", which, problems::to_string(d.kind)));
    }
    d.validate();
    if (spec.input_dim() != problems::input_dim(d.family) || spec.output_dim() != problems::output_dim(d.family)) {
        throw ConfigError(fmt::format("network shape does not fit {} tasks", problems::to_string(d.family)));
    }
}

std::string describe_distribution(const problems::TaskDistribution &d) {
    auto r = [](const problems::Range &x) { return fmt::format("[{:.17g},{:.17g}]", x.lo, x.hi); };
    std::string counts;
    for (int c : d.source_counts) {
        counts += fmt::format("{},", c);
    }
    const auto &b = d.budget;
    return fmt::format("kind={} family={} alpha={} beta={} zeta={} sources={} xy={} c={} nu={} lambda={} "
                       "budget={}/{}/{}/{}/{}",
                       problems::to_string(d.kind), problems::to_string(d.family), r(d.alpha), r(d.beta), r(d.zeta),
                       counts, r(d.source_xy), r(d.source_c), r(d.nu), r(d.lambda), b.interior, b.boundary,
                       b.initial, b.labeled, b.fd_grid);
}

}  // namespace

void MetaConfig::validate() const {
    spec.validate();
    start.validate();
    if (sweeps < 1 || tasks_per_sweep < 1) {
        throw ConfigError("meta-training needs at least one sweep and one task per sweep");
    }
    if (supervised < 0 || supervised > tasks_per_sweep) {
        throw ConfigError("supervised task count must lie in [0, tasks per sweep]");
    }
    if (inner.steps < 1) {
        throw ConfigError("inner steps must be at least 1");
    }
    if (!(eps0 >= 0.0)) {
        throw ConfigError("eps0 must be nonnegative");
    }
    inner.optimizer.validate();
    if (supervised > 0) {
        check_distribution(zero_order, InfoKind::zero_order, spec, "zero-order");
    }
    if (supervised < tasks_per_sweep) {
        check_distribution(high_order, InfoKind::high_order, spec, "high-order");
    }
}

std::string MetaConfig::describe() const {
    std::string widths;
    for (int w : spec.widths) {
        widths += fmt::format("{},", w);
    }
    const auto &o = inner.optimizer;
    const auto &w = inner.weights;
    std::string text = fmt::format(
        "net={} act={} adaptive={} scale={}\nstart={}\nsweeps={} tasks={} supervised={} eps0={:.17g}\n"
        "inner steps={} opt={} lr={:.17g} b1={:.17g} b2={:.17g} eps={:.17g} w={:.17g}/{:.17g}/{:.17g}/{:.17g}\n"
        "seed={}\n",
        widths, net::to_string(spec.activation), spec.adaptive_slope, spec.slope_scale, start.describe(), sweeps,
        tasks_per_sweep, supervised, eps0, inner.steps, training::to_string(o.kind), o.learning_rate, o.beta1,
        o.beta2, o.eps, w.pde, w.ic, w.bc, w.data, seed);
    if (supervised > 0) {
        text += "zero " + describe_distribution(zero_order) + "\n";
    }
    if (supervised < tasks_per_sweep) {
        text += "high " + describe_distribution(high_order) + "\n";
    }
    return text;
}

std::string MetaConfig::digest() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : describe()) {
        h = (h ^ c) * 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

MetaCheckpoint meta_init(const MetaConfig &cfg) {
    cfg.validate();
    MetaCheckpoint ck;
    ck.spec = cfg.spec;
    ck.digest = cfg.digest();
    ck.params = net::init(cfg.spec, cfg.start, util::derive_seed(cfg.seed, "start"));
    const std::uint64_t task_root = util::derive_seed(cfg.seed, "tasks");
    for (int i = 0; i < cfg.sweeps; ++i) {
        const double eps = epsilon_schedule(cfg.eps0, i, cfg.sweeps);
        int done = 0;
        for (int j = 0; j < cfg.tasks_per_sweep; ++j) {
            const bool zero = j < cfg.supervised;
            const auto &dist = zero ? cfg.zero_order : cfg.high_order;
            (zero ? ck.counters.zero_order_sampled : ck.counters.high_order_sampled)++;
            const auto task = problems::sample_task(
                dist, util::derive_seed(task_root, static_cast<std::uint64_t>(i) * cfg.tasks_per_sweep + j));
            OuterRecord rec{i, j, dist.kind, eps, 0.0, 0.0, false};
            try {
                const auto adapted = inner_adapt(task, cfg.spec, ck.params, cfg.inner);
                ck.params = reptile_outer_update(ck.params, adapted.params, eps);
                rec.loss_start = adapted.loss_start;
                rec.loss_end = adapted.loss_end;
                ++done;
            } catch (const NumericError &e) {
                rec.skipped = true;
                ++ck.counters.skipped;
                util::warn("sweep {} task {} skipped: {}", i, j, e.what());
            }
            util::info("sweep {} task {} ({}) eps {:.4g} loss {:.6g} -> {:.6g}", i, j, problems::to_string(dist.kind),
                       eps, rec.loss_start, rec.loss_end);
            ck.trace.push_back(rec);
        }
        if (done == 0) {
            throw NumericError(fmt::format("every task of sweep {} failed", i), "meta");
        }
    }
    return ck;
}

void write_outer_loss_csv(const std::filesystem::path &path, const std::vector<OuterRecord> &trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "sweep,task,kind,epsilon,loss_start,loss_end,skipped\n";
    for (const auto &r : trace) {
        out << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{}\n", r.sweep, r.task, problems::to_string(r.kind),
                           r.epsilon, r.loss_start, r.loss_end, r.skipped ? 1 : 0);
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void save_meta_checkpoint(const std::filesystem::path &path, const MetaCheckpoint &ck, const MetaConfig &cfg) {
    net::save_checkpoint(path.string(), ck.spec, ck.params);
    const auto csv = std::filesystem::path(path.string() + ".outer_loss.csv");
    write_outer_loss_csv(csv, ck.trace);
    nlohmann::ordered_json j;
    j["digest"] = ck.digest;
    j["config"] = cfg.describe();
    j["outer_loss_csv"] = csv.filename().string();
    j["zero_order_tasks"] = ck.counters.zero_order_sampled;
    j["high_order_tasks"] = ck.counters.high_order_sampled;
    j["skipped_tasks"] = ck.counters.skipped;
    std::ofstream out(path.string() + ".json", std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("cannot write provenance for " + path.string());
    }
}

std::optional<std::string> read_checkpoint_digest(const std::filesystem::path &path) {
    std::ifstream in(path.string() + ".json");
    if (!in) {
        return std::nullopt;
    }
    try {
        const auto j = nlohmann::json::parse(in);
        return j.at("digest").get<std::string>();
    } catch (const nlohmann::json::exception &e) {
        throw IoError(fmt::format("bad provenance sidecar for {}: {}", path.string(), e.what()));
    }
}

}  // namespace nrpinn::reptile

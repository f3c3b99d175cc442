#include "nrpinn/problems/tasks.hpp"

#include "nrpinn/problems/oracles.hpp"
#include "nrpinn/util/random.hpp"

#include <fmt/format.h>

namespace nrpinn::problems {

std::string_view to_string(InfoKind k) { return k == InfoKind::zero_order ? "zero_order" : "high_order"; }

TaskDistribution TaskDistribution::defaults(InfoKind kind, Family family) {
    TaskDistribution d;
    d.kind = kind;
    d.family = family == Family::burgers_inverse ? Family::burgers : family;
    if (d.family == Family::burgers && kind == InfoKind::zero_order) {
        d.nu = {0.005 / kPi, 0.1 / kPi};
    }
    if (domain_of(d.family).time_dependent) {
        d.budget.boundary = 500;
        d.budget.initial = 500;
    } else if (d.family == Family::poisson2d) {
        d.budget.boundary = 400;
    }
    return d;
}

void TaskDistribution::validate() const {
    auto ok = [](const Range &r) { return r.lo <= r.hi; };
    if (!ok(alpha) || !ok(beta) || !ok(zeta) || !ok(source_xy) || !ok(source_c) || !ok(nu) || !ok(lambda)) {
        throw ConfigError("task distribution: a parameter range has lo > hi");
    }
    if (budget.interior < 0 || budget.boundary < 0 || budget.initial < 0 || budget.labeled < 0) {
        throw ConfigError("task distribution: point budgets must be non-negative");
    }
    if (family == Family::poisson2d && source_counts.empty()) {
        throw ConfigError("task distribution: no heat-source counts");
    }
    for (int m : source_counts) {
        if (m < 0) {
            throw ConfigError("task distribution: negative heat-source count");
        }
    }
    if (kind == InfoKind::zero_order && family == Family::schrodinger) {
        throw UnsupportedError("schrodinger meta-training uses high-order tasks only");
    }
    if (kind == InfoKind::zero_order && budget.labeled == 0) {
        throw ConfigError("zero-order tasks need labeled points");
    }
    if (kind == InfoKind::zero_order && family == Family::burgers && !(nu.lo > 0)) {
        throw ConfigError("zero-order burgers tasks need nu > 0 for the Cole-Hopf labels");
    }
}

double Poisson1dSolutionFamily::operator()(double x) const {
    return zeta[0] * std::sin(eta[0] * x) + zeta[1] * std::cos(eta[1] * x) - zeta[2] * x + eta[2];
}

namespace {

double draw(util::Rng &rng, const Range &r) { return r.lo == r.hi ? r.lo : rng.uniform(r.lo, r.hi); }

PdeInstance draw_instance(const TaskDistribution &d, util::Rng &rng) {
    switch (d.family) {
    case Family::poisson1d: {
        const double a = draw(rng, d.alpha);
        const double b = draw(rng, d.beta);
        return Poisson1d{a, b};
    }
    case Family::poisson2d: {
        const int m = d.source_counts[rng.below(d.source_counts.size())];
        Poisson2d p;
        for (int i = 0; i < m; ++i) {
            HeatSource s;
            s.a = draw(rng, d.source_xy);
            s.b = draw(rng, d.source_xy);
            s.c = draw(rng, d.source_c);
            p.sources.push_back(s);
        }
        return p;
    }
    case Family::burgers:
    case Family::burgers_inverse:
        return Burgers{draw(rng, d.nu)};
    case Family::schrodinger:
        return Schrodinger{draw(rng, d.lambda)};
    }
    throw ConfigError("unknown family");
}

}  // namespace

Task poisson1d_zero_order_task(const Poisson1dSolutionFamily &coefficients, Eigen::Index n, std::uint64_t seed) {
    Task t;
    t.kind = InfoKind::zero_order;
    t.instance = Poisson1d{};
    t.solution = coefficients;
    t.labeled = sampler::sample_data(t.instance, n, util::derive_seed(seed, "labeled"),
                                     [&](std::span<const double> p) { return std::vector<double>{coefficients(p[0])}; });
    return t;
}

Task sample_task(const TaskDistribution &dist, std::uint64_t seed) {
    dist.validate();
    util::Rng rng(util::derive_seed(seed, "coefficients"));
    const auto &b = dist.budget;
    if (dist.kind == InfoKind::zero_order) {
        if (dist.family == Family::poisson1d) {
            Poisson1dSolutionFamily c;
            for (int i = 0; i < 3; ++i) {
                c.zeta[i] = draw(rng, dist.zeta);
                c.eta[i] = draw(rng, dist.zeta);
            }
            return poisson1d_zero_order_task(c, b.labeled, seed);
        }
        Task t;
        t.kind = InfoKind::zero_order;
        t.instance = draw_instance(dist, rng);
        const auto lab = util::derive_seed(seed, "labeled");
        if (dist.family == Family::poisson2d) {
            const Grid2d grid = oracle_poisson2d_fd(std::get<Poisson2d>(t.instance).sources, b.fd_grid);
            t.labeled = sampler::sample_data(t.instance, b.labeled, lab, [&](std::span<const double> p) {
                return std::vector<double>{grid.interpolate(p[0], p[1])};
            });
        } else {
            const BurgersColeHopf oracle(std::get<Burgers>(t.instance).nu);
            t.labeled = sampler::sample_data(t.instance, b.labeled, lab, [&](std::span<const double> p) {
                return std::vector<double>{oracle(p[0], p[1])};
            });
        }
        return t;
    }
    Task t;
    t.kind = InfoKind::high_order;
    t.instance = draw_instance(dist, rng);
    t.interior = sampler::sample_interior(t.instance, b.interior, util::derive_seed(seed, "interior"));
    t.boundary = sampler::sample_boundary(t.instance, b.boundary, util::derive_seed(seed, "boundary"));
    if (domain_of(dist.family).time_dependent) {
        t.initial = sampler::sample_initial(t.instance, b.initial, util::derive_seed(seed, "initial"));
    }
    return t;
}

}  // namespace nrpinn::problems

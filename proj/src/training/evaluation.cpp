#include "nrpinn/training/evaluation.hpp"

#include <fmt/format.h>

#include <fstream>

namespace nrpinn::training {

using problems::Family;

Metrics metrics(std::span<const double> pred, std::span<const double> ref) {
    if (pred.size() != ref.size() || ref.empty()) {
        throw ConfigError("metrics: prediction and reference grids differ in length or are empty");
    }
    double abs_sum = 0.0;
    double err2 = 0.0;
    double ref2 = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double e = pred[i] - ref[i];
        abs_sum += std::abs(e);
        err2 += e * e;
        ref2 += ref[i] * ref[i];
    }
    if (ref2 == 0.0) {
        throw NumericError("relative L2 is undefined for a zero reference", "metrics");
    }
    return {abs_sum / static_cast<double>(ref.size()), std::sqrt(err2 / ref2)};
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    }
    return v;
}

void fill_tensor(Evaluation &e, const std::vector<double> &xs, const std::vector<double> &ys) {
    e.points.resize(2, static_cast<Eigen::Index>(xs.size() * ys.size()));
    Eigen::Index c = 0;
    for (double x : xs) {
        for (double y : ys) {
            e.points(0, c) = x;
            e.points(1, c) = y;
            ++c;
        }
    }
}

}  // namespace

Evaluation make_evaluation(const problems::PdeInstance &inst, const EvalOptions &opts) {
    Evaluation e;
    e.family = problems::family_of(inst);
    auto pick = [](int v, int d) { return v > 0 ? v : d; };
    switch (e.family) {
    case Family::poisson1d: {
        const auto &pde = std::get<problems::Poisson1d>(inst);
        const auto xs = linspace(-10, 10, pick(opts.nx, 1001));
        e.points.resize(1, static_cast<Eigen::Index>(xs.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            e.points(0, static_cast<Eigen::Index>(i)) = xs[i];
            e.reference.push_back(problems::poisson1d_exact(pde, xs[i]).u);
        }
        break;
    }
    case Family::poisson2d: {
        const int n = pick(opts.nx, 256);
        if (opts.ny > 0 && opts.ny != n) {
            throw ConfigError("poisson2d evaluation grid must be square");
        }
        e.grid = problems::oracle_poisson2d_fd(std::get<problems::Poisson2d>(inst).sources, n - 1);
        fill_tensor(e, e.grid->xs, e.grid->ys);
        e.reference = e.grid->values;
        break;
    }
    case Family::burgers:
    case Family::burgers_inverse: {
        const double nu = e.family == Family::burgers ? std::get<problems::Burgers>(inst).nu
                                                      : std::get<problems::BurgersInverse>(inst).nu_true;
        const problems::BurgersColeHopf oracle(nu);
        problems::Grid2d g;
        g.xs = linspace(-1, 1, pick(opts.nx, 256));
        g.ys = linspace(0, 1, pick(opts.ny, 100));
        g.values.resize(g.xs.size() * g.ys.size());
        fill_tensor(e, g.xs, g.ys);
        for (Eigen::Index c = 0; c < e.points.cols(); ++c) {
            g.values[c] = oracle(e.points(0, c), e.points(1, c));
        }
        e.reference = g.values;
        e.grid = std::move(g);
        break;
    }
    case Family::schrodinger: {
        problems::SchrodingerOptions so;
        so.modes = pick(opts.nx, 256);
        so.snapshots = pick(opts.ny, 201);
        e.spectral = problems::oracle_schrodinger_spectral(std::get<problems::Schrodinger>(inst).lambda, so);
        e.grid = e.spectral->modulus_grid();
        fill_tensor(e, e.grid->xs, e.grid->ys);
        e.reference = e.grid->values;
        break;
    }
    }
    return e;
}

std::vector<double> predict_field(const net::MlpSpec &spec, const net::ParamVector &params, const Evaluation &eval,
                                  kernels::Backend backend) {
    const auto jets = kernels::forward(spec, params, eval.points, kernels::Tracking::none(), backend);
    std::vector<double> out(static_cast<std::size_t>(eval.size()));
    for (Eigen::Index c = 0; c < eval.size(); ++c) {
        if (eval.family == Family::schrodinger) {
            out[c] = std::hypot(jets.value(0, c), jets.value(1, c));
        } else {
            out[c] = jets.value(0, c);
        }
    }
    return out;
}

sampler::Labeler reference_labeler(const problems::PdeInstance &inst, const Evaluation &eval) {
    switch (problems::family_of(inst)) {
    case Family::poisson1d: {
        const auto pde = std::get<problems::Poisson1d>(inst);
        return [pde](std::span<const double> p) { return std::vector<double>{problems::poisson1d_exact(pde, p[0]).u}; };
    }
    case Family::poisson2d: {
        if (!eval.grid) {
            throw ConfigError("poisson2d labels need an oracle grid");
        }
        const problems::Grid2d *g = &*eval.grid;
        return [g](std::span<const double> p) { return std::vector<double>{g->interpolate(p[0], p[1])}; };
    }
    case Family::burgers:
    case Family::burgers_inverse: {
        const double nu = std::holds_alternative<problems::Burgers>(inst)
                              ? std::get<problems::Burgers>(inst).nu
                              : std::get<problems::BurgersInverse>(inst).nu_true;
        auto oracle = std::make_shared<problems::BurgersColeHopf>(nu);
        return [oracle](std::span<const double> p) { return std::vector<double>{(*oracle)(p[0], p[1])}; };
    }
    case Family::schrodinger:
        throw UnsupportedError("schrodinger has no pointwise data labels");
    }
    throw ConfigError("unknown family");
}

void write_solution_csv(const std::filesystem::path &path, const Evaluation &eval, std::span<const double> pred) {
    if (static_cast<Eigen::Index>(pred.size()) != eval.size()) {
        throw ConfigError("solution csv: prediction length mismatch");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    const auto names = sampler::coordinate_names(eval.family);
    for (const auto &n : names) {
        out << n << ',';
    }
    out << "pred,ref,abs_err\n";
    for (Eigen::Index c = 0; c < eval.size(); ++c) {
        std::string line;
        for (Eigen::Index i = 0; i < eval.points.rows(); ++i) {
            line += fmt::format("{:.17g},", eval.points(i, c));
        }
        line += fmt::format("{:.17g},{:.17g},{:.17g}\n", pred[c], eval.reference[c], std::abs(pred[c] - eval.reference[c]));
        out << line;
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace nrpinn::training

#include "nrpinn/cli/commands.hpp"

#include "nrpinn/network/checkpoint.hpp"
#include "nrpinn/util/log.hpp"
#include "nrpinn/util/random.hpp"

#include <fmt/format.h>

#include <cctype>
#include <fstream>

namespace nrpinn::cli {

using problems::Family;
namespace fs = std::filesystem;

namespace {

void make_dir(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    }
}

std::ofstream open_out(const fs::path &path) {
    if (path.has_parent_path()) {
        make_dir(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

std::vector<net::ExtraSlot> extras_for(const ExperimentConfig &cfg) {
    if (cfg.family() == Family::burgers_inverse) {
        return {{std::string(net::kNuSlot), cfg.nu_init}};
    }
    return {};
}

bool is_inverse(const ExperimentConfig &cfg) { return cfg.family() == Family::burgers_inverse; }

sampler::PointSet inverse_data(const ExperimentConfig &cfg, const training::Evaluation &eval) {
    auto data = sampler::sample_data(cfg.problem, cfg.train.data, util::derive_seed(cfg.train.seed, "data"),
                                     training::reference_labeler(cfg.problem, eval));
    if (cfg.noise_pct > 0) {
        data = sampler::add_noise(data, cfg.noise_pct, util::derive_seed(cfg.train.seed, "noise"));
    }
    return data;
}

void write_nu_summary(const fs::path &path, const ExperimentConfig &cfg, const std::vector<CompareRow> &rows) {
    auto out = open_out(path);
    out << "scheme,nu_estimate,nu_rel_error,iterations\n";
    for (const auto &r : rows) {
        const auto &last = r.result.history.last();
        const double nu = last.nu.value_or(std::numeric_limits<double>::quiet_NaN());
        out << fmt::format("{},{:.17g},{:.17g},{}\n", r.label, nu, training::nu_relative_error(cfg.problem, nu),
                           last.iteration);
    }
}

void report(const std::vector<CompareRow> &rows, bool inverse, const problems::PdeInstance &inst) {
    fmt::print("{:<24} {:>14} {:>14} {:>10}{}\n", "scheme", "mae", "rel_l2", "iteration", inverse ? "      nu_error" : "");
    for (const auto &r : rows) {
        const auto &l = r.result.history.last();
        fmt::print("{:<24} {:>14.6e} {:>14.6e} {:>10}", r.label, l.mae, l.rel_l2, l.iteration);
        if (inverse && l.nu) {
            fmt::print(" {:>13.4f}%", 100 * training::nu_relative_error(inst, *l.nu));
        }
        fmt::print("{}\n", r.result.failure ? "  (stopped: " + *r.result.failure + ")" : "");
    }
}

}  // namespace

std::string slug(const std::string &label) {
    std::string s;
    for (char c : label) {
        s += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_';
    }
    return s;
}

fs::path ensure_meta_checkpoint(const ExperimentConfig &cfg) {
    if (!cfg.meta) {
        throw ConfigError(fmt::format("config {} has no [meta] section", cfg.source.string()));
    }
    const auto digest = cfg.meta->digest();
    if (fs::exists(cfg.meta_checkpoint) && reptile::read_checkpoint_digest(cfg.meta_checkpoint) == digest) {
        util::info("reusing meta checkpoint {} ({})", cfg.meta_checkpoint.string(), digest);
        return cfg.meta_checkpoint;
    }
    util::info("meta-training {} ({})", cfg.meta_checkpoint.string(), digest);
    const auto ck = reptile::meta_init(*cfg.meta);
    if (cfg.meta_checkpoint.has_parent_path()) {
        make_dir(cfg.meta_checkpoint.parent_path());
    }
    reptile::save_meta_checkpoint(cfg.meta_checkpoint, ck, *cfg.meta);
    if (ck.counters.skipped > 0) {
        util::warn("{} of {} meta tasks were skipped", ck.counters.skipped, ck.trace.size());
    }
    return cfg.meta_checkpoint;
}

net::ParamVector resolve_init(const ExperimentConfig &cfg, const std::string &scheme) {
    net::InitScheme s;
    if (scheme == "meta") {
        s = net::InitScheme::checkpoint(ensure_meta_checkpoint(cfg).string());
    } else if (scheme.rfind("meta:", 0) == 0) {
        const auto meta_cfg = load_config(scheme.substr(5));
        s = net::InitScheme::checkpoint(ensure_meta_checkpoint(meta_cfg).string());
    } else {
        s = net::InitScheme::parse(scheme);
    }
    return net::init(cfg.network, s, cfg.init_seed, extras_for(cfg));
}

fs::path cmd_meta_train(const ExperimentConfig &cfg) {
    const auto path = ensure_meta_checkpoint(cfg);
    fmt::print("{} {}\n", *reptile::read_checkpoint_digest(path), path.string());
    return path;
}

std::vector<CompareRow> cmd_compare(const ExperimentConfig &cfg) {
    if (cfg.compare.empty()) {
        throw ConfigError("compare: no schemes listed in [compare] schemes");
    }
    make_dir(cfg.output_dir);
    const auto eval = training::make_evaluation(cfg.problem, cfg.eval);
    const bool inverse = is_inverse(cfg);
    training::TrainingSets sets;
    if (inverse) {
        sets.interior = sampler::sample_interior(cfg.problem, cfg.train.interior,
                                                 util::derive_seed(cfg.train.seed, "interior"));
        sets.data = inverse_data(cfg, eval);
    } else {
        sampler::Labeler labels;
        if (cfg.train.data > 0) {
            labels = training::reference_labeler(cfg.problem, eval);
        }
        sets = training::sample_training_sets(cfg.problem, cfg.train, labels);
    }

    std::vector<CompareRow> rows;
    for (const auto &e : cfg.compare) {
        util::info("compare: {} ({})", e.label, e.scheme);
        const auto init = resolve_init(cfg, e.scheme);
        rows.push_back({e.label, training::train(cfg.problem, cfg.network, init, sets, cfg.train, eval)});
        const auto &res = rows.back().result;
        res.history.write_csv(cfg.output_dir / (slug(e.label) + ".history.csv"));
        training::write_solution_csv(cfg.output_dir / (slug(e.label) + ".solution.csv"), eval,
                                     training::predict_field(cfg.network, res.params, eval, cfg.train.backend));
    }

    auto out = open_out(cfg.output_dir / "compare.csv");
    out << "scheme,iteration,loss_pde,loss_ic,loss_bc,loss_data,loss_total,mae,rel_l2,nu_estimate\n";
    for (const auto &r : rows) {
        for (const auto &h : r.result.history.rows) {
            out << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},", r.label, h.iteration,
                               h.loss.pde, h.loss.ic, h.loss.bc, h.loss.data, h.loss.total, h.mae, h.rel_l2);
            if (h.nu) {
                out << fmt::format("{:.17g}", *h.nu);
            }
            out << '\n';
        }
    }
    write_summary_csv(cfg.output_dir / "summary.csv", rows);
    if (inverse) {
        write_nu_summary(cfg.output_dir / "nu_summary.csv", cfg, rows);
    }
    report(rows, inverse, cfg.problem);
    return rows;
}

training::SolveResult cmd_solve(const ExperimentConfig &cfg) {
    if (is_inverse(cfg)) {
        throw ConfigError("solve: burgers_inverse runs through the inverse command");
    }
    const auto eval = training::make_evaluation(cfg.problem, cfg.eval);
    const auto init = resolve_init(cfg, cfg.init);
    auto res = training::solve(cfg.problem, cfg.network, init, cfg.train, eval);
    make_dir(cfg.output_dir);
    res.history.write_csv(cfg.output_dir / "history.csv");
    training::write_solution_csv(cfg.output_dir / "solution.csv", eval,
                                 training::predict_field(cfg.network, res.params, eval, cfg.train.backend));
    const std::vector<CompareRow> rows{{cfg.init, res}};
    write_summary_csv(cfg.output_dir / "summary.csv", rows);
    report(rows, false, cfg.problem);
    return res;
}

training::SolveResult cmd_inverse(const ExperimentConfig &cfg) {
    if (!is_inverse(cfg)) {
        throw ConfigError("inverse: the problem family must be burgers_inverse");
    }
    const auto eval = training::make_evaluation(cfg.problem, cfg.eval);
    const auto init = resolve_init(cfg, cfg.init);
    auto res = training::solve_inverse(cfg.problem, cfg.network, init, inverse_data(cfg, eval), cfg.train, eval);
    make_dir(cfg.output_dir);
    res.history.write_csv(cfg.output_dir / "history.csv");
    training::write_solution_csv(cfg.output_dir / "solution.csv", eval,
                                 training::predict_field(cfg.network, res.params, eval, cfg.train.backend));
    const std::vector<CompareRow> rows{{cfg.init, res}};
    write_summary_csv(cfg.output_dir / "summary.csv", rows);
    write_nu_summary(cfg.output_dir / "nu_summary.csv", cfg, rows);
    report(rows, true, cfg.problem);
    return res;
}

fs::path cmd_oracle(const ExperimentConfig &cfg) {
    const auto eval = training::make_evaluation(cfg.problem, cfg.eval);
    const auto path = cfg.output_dir / "oracle.csv";
    if (eval.grid && cfg.family() != Family::poisson1d) {
        if (path.has_parent_path()) {
            make_dir(path.parent_path());
        }
        problems::write_grid_csv(path, *eval.grid, sampler::coordinate_names(cfg.family())[1]);
    } else {
        auto out = open_out(path);
        out << "x,value\n";
        for (Eigen::Index c = 0; c < eval.size(); ++c) {
            out << fmt::format("{:.17g},{:.17g}\n", eval.points(0, c), eval.reference[c]);
        }
    }
    fmt::print("{}\n", path.string());
    return path;
}

void write_summary_csv(const fs::path &path, const std::vector<CompareRow> &rows) {
    auto out = open_out(path);
    out << "scheme,mae,rel_l2,iterations\n";
    for (const auto &r : rows) {
        const auto &l = r.result.history.last();
        out << fmt::format("{},{:.17g},{:.17g},{}\n", r.label, l.mae, l.rel_l2, l.iteration);
    }
}

}  // namespace nrpinn::cli

#include "nrpinn/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nrpinn::cli {

namespace pt = boost::property_tree;
using problems::Family;

namespace {

const std::map<std::string, std::set<std::string>> &known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"problem", {"family", "alpha", "beta", "sources", "nu", "lambda", "nu_true"}},
        {"network", {"widths", "activation", "adaptive_slope", "slope_scale"}},
        {"init", {"scheme", "seed"}},
        {"meta",
         {"sweeps", "tasks_per_sweep", "supervised", "inner_steps", "inner_optimizer", "inner_lr", "eps0", "seed",
          "start", "checkpoint"}},
        {"meta_zero",
         {"family", "interior", "boundary", "initial", "labeled", "fd_grid", "alpha", "beta", "zeta", "nu", "lambda",
          "source_xy", "source_c", "source_counts"}},
        {"meta_high",
         {"family", "interior", "boundary", "initial", "labeled", "fd_grid", "alpha", "beta", "zeta", "nu", "lambda",
          "source_xy", "source_c", "source_counts"}},
        {"train",
         {"interior", "boundary", "initial", "data", "iterations", "optimizer", "lr", "beta1", "beta2", "adam_eps",
          "eval_interval", "seed", "backend", "w_pde", "w_ic", "w_bc", "w_data", "noise_pct", "nu_init"}},
        {"eval", {"nx", "ny"}},
        {"compare", {"schemes"}},
        {"output", {"dir"}},
    };
    return keys;
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        const auto a = cur.find_first_not_of(" \t");
        const auto b = cur.find_last_not_of(" \t");
        out.push_back(a == std::string::npos ? std::string() : cur.substr(a, b - a + 1));
    }
    return out;
}

// Typed access with the section/key in every diagnostic.
class Reader {
  public:
    explicit Reader(const pt::ptree &tree) : tree_(tree) {}

    [[nodiscard]] bool has(const std::string &sec, const std::string &key) const {
        return raw(sec, key).has_value();
    }
    [[nodiscard]] bool has_section(const std::string &sec) const { return tree_.get_child_optional(sec).has_value(); }

    [[nodiscard]] std::optional<std::string> raw(const std::string &sec, const std::string &key) const {
        const auto s = tree_.get_child_optional(sec);
        if (!s) {
            return std::nullopt;
        }
        const auto v = s->get_child_optional(key);
        if (!v) {
            return std::nullopt;
        }
        return v->data();
    }

    template <typename T>
    void get(const std::string &sec, const std::string &key, T &out) const {
        if (const auto v = raw(sec, key)) {
            out = convert<T>(*v, sec, key);
        }
    }

    template <typename T>
    [[nodiscard]] T convert(const std::string &text, const std::string &sec, const std::string &key) const {
        if constexpr (std::is_same_v<T, std::string>) {
            return text;
        } else if constexpr (std::is_same_v<T, bool>) {
            if (text == "true" || text == "1" || text == "yes") {
                return true;
            }
            if (text == "false" || text == "0" || text == "no") {
                return false;
            }
            throw bad(sec, key, text);
        } else {
            T v{};
            const auto *end = text.data() + text.size();
            const auto r = std::from_chars(text.data(), end, v);
            if (r.ec != std::errc() || r.ptr != end) {
                throw bad(sec, key, text);
            }
            return v;
        }
    }

    void range(const std::string &sec, const std::string &key, problems::Range &out) const {
        if (const auto v = raw(sec, key)) {
            const auto parts = split(*v, '|');
            if (parts.size() != 2) {
                throw bad(sec, key, *v);
            }
            out = {convert<double>(parts[0], sec, key), convert<double>(parts[1], sec, key)};
        }
    }

    template <typename T>
    void list(const std::string &sec, const std::string &key, std::vector<T> &out) const {
        if (const auto v = raw(sec, key)) {
            out.clear();
            for (const auto &p : split(*v, '|')) {
                out.push_back(convert<T>(p, sec, key));
            }
        }
    }

    [[nodiscard]] static ConfigError bad(const std::string &sec, const std::string &key, const std::string &text) {
        return ConfigError(fmt::format("config: bad value '{}' for {}.{}", text, sec, key));
    }

  private:
    const pt::ptree &tree_;
};

void check_keys(const pt::ptree &tree) {
    for (const auto &[sec, body] : tree) {
        const auto it = known_keys().find(sec);
        if (it == known_keys().end()) {
            throw ConfigError(fmt::format("config: unknown section [{}]", sec));
        }
        for (const auto &[key, v] : body) {
            if (!it->second.contains(key)) {
                throw ConfigError(fmt::format("config: unknown key {}.{}", sec, key));
            }
        }
    }
}

void apply_override(pt::ptree &tree, const std::string &text) {
    const auto eq = text.find('=');
    const auto dot = text.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ConfigError(fmt::format("override '{}' is not section.key=value", text));
    }
    const std::string sec = text.substr(0, dot);
    const std::string key = text.substr(dot + 1, eq - dot - 1);
    tree.put(pt::ptree::path_type(sec + '/' + key, '/'), text.substr(eq + 1));
}

net::MlpSpec default_network(Family f) {
    switch (f) {
    case Family::poisson1d: return {{1, 50, 50, 50, 50, 1}};
    case Family::poisson2d: return {{2, 100, 100, 100, 100, 1}};
    case Family::burgers:
    case Family::burgers_inverse: return {{2, 20, 20, 20, 20, 20, 20, 20, 20, 1}};
    case Family::schrodinger: return {{2, 100, 100, 100, 100, 2}};
    }
    throw ConfigError("unknown family");
}

// Point budgets and iteration counts of the target runs per family.
training::TrainConfig default_train(Family f) {
    training::TrainConfig t;
    switch (f) {
    case Family::poisson1d:
        t.interior = 500;
        t.boundary = 2;
        t.data = 50;
        t.iterations = 900;
        break;
    case Family::poisson2d:
        t.interior = 4000;
        t.boundary = 1000;
        t.iterations = 4000;
        break;
    case Family::burgers:
        t.interior = 10000;
        t.boundary = 2500;
        t.initial = 2500;
        t.iterations = 2000;
        break;
    case Family::burgers_inverse:
        t.interior = 2000;
        t.boundary = 0;
        t.data = 10000;
        t.iterations = 80000;
        break;
    case Family::schrodinger:
        t.interior = 20000;
        t.boundary = 500;
        t.initial = 500;
        t.iterations = 30000;
        break;
    }
    return t;
}

problems::PdeInstance read_problem(const Reader &r) {
    std::string fam_text = "poisson1d";
    r.get("problem", "family", fam_text);
    const Family fam = problems::parse_family(fam_text);
    problems::PdeInstance inst = problems::target_instance(fam);
    std::visit(
        [&](auto &p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, problems::Poisson1d>) {
                r.get("problem", "alpha", p.alpha);
                r.get("problem", "beta", p.beta);
            } else if constexpr (std::is_same_v<P, problems::Poisson2d>) {
                if (const auto v = r.raw("problem", "sources")) {
                    p.sources.clear();
                    if (*v != "none" && *v != "benchmark") {
                        for (const auto &s : split(*v, '|')) {
                            const auto abc = split(s, ':');
                            if (abc.size() != 3) {
                                throw Reader::bad("problem", "sources", *v);
                            }
                            p.sources.push_back({r.convert<double>(abc[0], "problem", "sources"),
                                                 r.convert<double>(abc[1], "problem", "sources"),
                                                 r.convert<double>(abc[2], "problem", "sources")});
                        }
                    } else if (*v == "benchmark") {
                        p.sources = problems::benchmark_heat_sources();
                    }
                }
            } else if constexpr (std::is_same_v<P, problems::Burgers>) {
                r.get("problem", "nu", p.nu);
            } else if constexpr (std::is_same_v<P, problems::BurgersInverse>) {
                r.get("problem", "nu_true", p.nu_true);
            } else {
                r.get("problem", "lambda", p.lambda);
            }
        },
        inst);
    problems::validate(inst);
    return inst;
}

void read_distribution(const Reader &r, const std::string &sec, problems::TaskDistribution &d) {
    if (const auto f = r.raw(sec, "family")) {
        d = problems::TaskDistribution::defaults(d.kind, problems::parse_family(*f));
    }
    r.get(sec, "interior", d.budget.interior);
    r.get(sec, "boundary", d.budget.boundary);
    r.get(sec, "initial", d.budget.initial);
    r.get(sec, "labeled", d.budget.labeled);
    r.get(sec, "fd_grid", d.budget.fd_grid);
    r.range(sec, "alpha", d.alpha);
    r.range(sec, "beta", d.beta);
    r.range(sec, "zeta", d.zeta);
    r.range(sec, "nu", d.nu);
    r.range(sec, "lambda", d.lambda);
    r.range(sec, "source_xy", d.source_xy);
    r.range(sec, "source_c", d.source_c);
    r.list(sec, "source_counts", d.source_counts);
}

// File references inside a scheme are relative to the config file's directory.
std::string resolve_scheme(const std::string &scheme, const std::filesystem::path &source) {
    std::string prefix;
    if (scheme.rfind("checkpoint:", 0) == 0) {
        prefix = "checkpoint:";
    } else if (scheme.rfind("meta:", 0) == 0) {
        prefix = "meta:";
    } else {
        if (scheme != "meta") {
            net::InitScheme::parse(scheme).validate();
        }
        return scheme;
    }
    std::filesystem::path path = scheme.substr(prefix.size());
    if (path.is_relative() && !source.empty()) {
        path = source.parent_path() / path;
    }
    if (!std::filesystem::exists(path)) {
        throw ConfigError(fmt::format("config: referenced file '{}' does not exist", path.string()));
    }
    return prefix + path.lexically_normal().string();
}

}  // namespace

ExperimentConfig parse_config(const std::string &ini_text, const std::vector<std::string> &overrides,
                              const std::filesystem::path &source) {
    pt::ptree tree;
    std::istringstream in(ini_text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigError(fmt::format("config {}: {}", source.string(), e.what()));
    }
    for (const auto &o : overrides) {
        apply_override(tree, o);
    }
    check_keys(tree);
    const Reader r(tree);

    ExperimentConfig c;
    c.source = source;
    c.problem = read_problem(r);
    const Family fam = c.family();

    c.network = default_network(fam);
    r.list("network", "widths", c.network.widths);
    if (const auto a = r.raw("network", "activation")) {
        c.network.activation = net::parse_activation(*a);
    }
    r.get("network", "adaptive_slope", c.network.adaptive_slope);
    r.get("network", "slope_scale", c.network.slope_scale);
    c.network.validate();

    r.get("init", "scheme", c.init);
    r.get("init", "seed", c.init_seed);

    c.train = default_train(fam);
    auto &t = c.train;
    r.get("train", "interior", t.interior);
    r.get("train", "boundary", t.boundary);
    r.get("train", "initial", t.initial);
    r.get("train", "data", t.data);
    r.get("train", "iterations", t.iterations);
    if (const auto o = r.raw("train", "optimizer")) {
        t.optimizer.kind = training::parse_optimizer(*o);
    }
    r.get("train", "lr", t.optimizer.learning_rate);
    r.get("train", "beta1", t.optimizer.beta1);
    r.get("train", "beta2", t.optimizer.beta2);
    r.get("train", "adam_eps", t.optimizer.eps);
    r.get("train", "eval_interval", t.eval_interval);
    r.get("train", "seed", t.seed);
    if (const auto b = r.raw("train", "backend")) {
        if (*b == "reference") {
            t.backend = kernels::Backend::reference;
        } else if (*b == "openmp") {
            t.backend = kernels::Backend::openmp;
        } else {
            throw Reader::bad("train", "backend", *b);
        }
    }
    r.get("train", "w_pde", t.weights.pde);
    r.get("train", "w_ic", t.weights.ic);
    r.get("train", "w_bc", t.weights.bc);
    r.get("train", "w_data", t.weights.data);
    r.get("train", "noise_pct", c.noise_pct);
    r.get("train", "nu_init", c.nu_init);
    t.validate();
    if (c.noise_pct < 0) {
        throw ConfigError("config: train.noise_pct must be nonnegative");
    }

    r.get("eval", "nx", c.eval.nx);
    r.get("eval", "ny", c.eval.ny);
    std::string out_dir = c.output_dir.string();
    r.get("output", "dir", out_dir);
    c.output_dir = out_dir;
    c.meta_checkpoint = c.output_dir / "meta.ckpt";

    if (r.has_section("meta")) {
        using problems::InfoKind;
        reptile::MetaConfig m;
        m.spec = c.network;
        m.zero_order = problems::TaskDistribution::defaults(InfoKind::zero_order, fam);
        m.high_order = problems::TaskDistribution::defaults(InfoKind::high_order, fam);
        r.get("meta", "sweeps", m.sweeps);
        r.get("meta", "tasks_per_sweep", m.tasks_per_sweep);
        r.get("meta", "supervised", m.supervised);
        r.get("meta", "inner_steps", m.inner.steps);
        if (const auto o = r.raw("meta", "inner_optimizer")) {
            m.inner.optimizer.kind = training::parse_optimizer(*o);
        }
        r.get("meta", "inner_lr", m.inner.optimizer.learning_rate);
        r.get("meta", "eps0", m.eps0);
        r.get("meta", "seed", m.seed);
        if (const auto s = r.raw("meta", "start")) {
            m.start = net::InitScheme::parse(*s);
        }
        std::string ck = c.meta_checkpoint.string();
        r.get("meta", "checkpoint", ck);
        c.meta_checkpoint = ck;
        m.inner.weights = t.weights;
        m.inner.backend = t.backend;
        read_distribution(r, "meta_zero", m.zero_order);
        read_distribution(r, "meta_high", m.high_order);
        m.validate();
        c.meta = m;
    } else if (r.has_section("meta_zero") || r.has_section("meta_high")) {
        throw ConfigError("config: task distributions given without a [meta] section");
    }

    if (const auto s = r.raw("compare", "schemes")) {
        for (const auto &entry : split(*s, '|')) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos || eq == 0 || entry.substr(0, eq).find(',') != std::string::npos) {
                throw Reader::bad("compare", "schemes", entry);
            }
            c.compare.push_back({entry.substr(0, eq), entry.substr(eq + 1)});
        }
    }

    if (c.init == "meta" && !c.meta) {
        throw ConfigError("config: init.scheme = meta needs a [meta] section");
    }
    c.init = resolve_scheme(c.init, source);
    for (auto &e : c.compare) {
        if (e.scheme == "meta" && !c.meta) {
            throw ConfigError("config: scheme 'meta' needs a [meta] section");
        }
        e.scheme = resolve_scheme(e.scheme, source);
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path, const std::vector<std::string> &overrides) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), overrides, path);
}

}  // namespace nrpinn::cli

#include "nrpinn/autodiff/tape.hpp"

#include "nrpinn/errors.hpp"

#include <cassert>

namespace nrpinn::ad {

Var Tape::variable(double value) {
    nodes_.push_back({kNoParent, kNoParent, 0.0, 0.0});
    return {value, this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

std::vector<Var> Tape::variables(std::span<const double> values) {
    std::vector<Var> out;
    out.reserve(values.size());
    for (double v : values) {
        out.push_back(variable(v));
    }
    return out;
}

Var Tape::unary(double value, const Var &a, double da) {
    nodes_.push_back({a.index_, kNoParent, da, 0.0});
    return {value, this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::binary(double value, const Var &a, double da, const Var &b, double db) {
    const std::uint32_t lhs = a.is_constant() ? kNoParent : a.index_;
    const std::uint32_t rhs = b.is_constant() ? kNoParent : b.index_;
    nodes_.push_back({lhs, rhs, da, db});
    return {value, this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void Tape::backward(const Var &output, std::vector<double> &adjoint) const {
    adjoint.assign(nodes_.size(), 0.0);
    if (output.is_constant()) {
        return;
    }
    assert(output.tape() == this);
    adjoint[output.index()] = 1.0;
    for (std::size_t i = output.index() + 1; i-- > 0;) {
        const double a = adjoint[i];
        if (a == 0.0) {
            continue;
        }
        const Node &n = nodes_[i];
        if (n.lhs != kNoParent) {
            adjoint[n.lhs] += a * n.dlhs;
        }
        if (n.rhs != kNoParent) {
            adjoint[n.rhs] += a * n.drhs;
        }
    }
}

std::vector<double> grad_params(const Var &loss, std::span<const Var> wrt, const std::string &term) {
    if (!std::isfinite(loss.value())) {
        throw NumericError("non-finite value in term '" + term + "'", term);
    }
    std::vector<double> grad(wrt.size(), 0.0);
    if (loss.is_constant()) {
        return grad;
    }
    std::vector<double> adjoint;
    loss.tape()->backward(loss, adjoint);
    for (std::size_t i = 0; i < wrt.size(); ++i) {
        if (wrt[i].is_constant()) {
            continue;
        }
        if (wrt[i].tape() != loss.tape()) {
            throw ConfigError("grad_params: leaf recorded on a different tape");
        }
        const double g = adjoint[wrt[i].index()];
        if (!std::isfinite(g)) {
            throw NumericError("non-finite gradient in term '" + term + "'", term);
        }
        grad[i] = g;
    }
    return grad;
}

namespace {

Tape *tape_of(const Var &a, const Var &b) {
    Tape *t = a.tape() != nullptr ? a.tape() : b.tape();
    assert(a.is_constant() || b.is_constant() || a.tape() == b.tape());
    return t;
}

}  // namespace

Var operator+(const Var &a, const Var &b) {
    const double v = a.value() + b.value();
    Tape *t = tape_of(a, b);
    return t == nullptr ? Var(v) : t->binary(v, a, 1.0, b, 1.0);
}

Var operator-(const Var &a, const Var &b) {
    const double v = a.value() - b.value();
    Tape *t = tape_of(a, b);
    return t == nullptr ? Var(v) : t->binary(v, a, 1.0, b, -1.0);
}

Var operator*(const Var &a, const Var &b) {
    const double v = a.value() * b.value();
    Tape *t = tape_of(a, b);
    return t == nullptr ? Var(v) : t->binary(v, a, b.value(), b, a.value());
}

Var operator/(const Var &a, const Var &b) {
    const double v = a.value() / b.value();
    Tape *t = tape_of(a, b);
    return t == nullptr ? Var(v) : t->binary(v, a, 1.0 / b.value(), b, -v / b.value());
}

Var operator-(const Var &a) {
    return a.is_constant() ? Var(-a.value()) : a.tape()->unary(-a.value(), a, -1.0);
}

namespace {

template <class F, class D>
Var apply(const Var &a, F f, D df) {
    const double x = a.value();
    return a.is_constant() ? Var(f(x)) : a.tape()->unary(f(x), a, df(x));
}

}  // namespace

Var sin(const Var &a) {
    return apply(a, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
}

Var cos(const Var &a) {
    return apply(a, [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); });
}

Var tanh(const Var &a) {
    return apply(
        a, [](double x) { return std::tanh(x); },
        [](double x) {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        });
}

Var exp(const Var &a) {
    return apply(a, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); });
}

Var sech(const Var &a) {
    return apply(
        a, [](double x) { return 1.0 / std::cosh(x); },
        [](double x) { return -std::tanh(x) / std::cosh(x); });
}

Var sqrt(const Var &a) {
    return apply(
        a, [](double x) { return std::sqrt(x); }, [](double x) { return 0.5 / std::sqrt(x); });
}

Var pow(const Var &a, int n) {
    return apply(
        a, [n](double x) { return std::pow(x, n); },
        [n](double x) { return n == 0 ? 0.0 : n * std::pow(x, n - 1); });
}

}  // namespace nrpinn::ad

#include "helpers.hpp"

#include "nrpinn/autodiff/check.hpp"
#include "nrpinn/autodiff/eval_jet.hpp"
#include "nrpinn/autodiff/jet.hpp"
#include "nrpinn/autodiff/tape.hpp"
#include "nrpinn/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace nrpinn;
using namespace testing_helpers;
using ad::Jet2;
using ad::Tape;
using ad::Var;

TEST_CASE("tape: quadratic and constant gradients") {
    Tape tape;
    const std::vector<double> theta{0.5, -1.25, 3.0};
    auto leaves = tape.variables(theta);
    Var loss = 0.0;
    for (const auto &v : leaves) {
        loss += v * v;
    }
    const auto g = ad::grad_params(loss, leaves);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        CHECK(g[i] == doctest::Approx(2 * theta[i]).epsilon(1e-15));
    }
    const Var constant = Var(4.0) * Var(2.0);
    const auto zero = ad::grad_params(constant, leaves);
    CHECK(std::all_of(zero.begin(), zero.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("tape: non-finite loss names the term") {
    Tape tape;
    auto leaves = tape.variables(std::vector<double>{0.0});
    const Var bad = Var(1.0) / leaves[0];
    try {
        (void)ad::grad_params(bad, leaves, "pde");
        FAIL("expected NumericError");
    } catch (const NumericError &e) {
        CHECK(e.term() == "pde");
    }
}

TEST_CASE("tape: gradient is linear in the loss") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> theta(5);
    for (auto &t : theta) {
        t = u(rng);
    }
    auto l1 = [](auto p) {
        using T = std::decay_t<decltype(p[0])>;
        using std::sin;
        T acc = T(0.0);
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            acc += sin(p[i]) * p[i + 1];
        }
        return acc;
    };
    auto l2 = [](auto p) {
        using T = std::decay_t<decltype(p[0])>;
        using std::exp;
        T acc = T(0.0);
        for (const auto &x : p) {
            acc += exp(x) / (T(2.0) + x * x);
        }
        return acc;
    };
    const double a = 0.7;
    const double b = -2.3;
    Tape tape;
    auto leaves = tape.variables(theta);
    const std::span<const Var> s(leaves);
    const auto g1 = ad::grad_params(l1(s), leaves);
    const auto g2 = ad::grad_params(l2(s), leaves);
    const auto gc = ad::grad_params(Var(a) * l1(s) + Var(b) * l2(s), leaves);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        CHECK(gc[i] == doctest::Approx(a * g1[i] + b * g2[i]).epsilon(1e-13));
    }
}

TEST_CASE("check_gradient: bilinear, constant, bad step") {
    const std::vector<double> p{2.0, 3.0};
    CHECK(ad::check_gradient([](auto q) { return q[0] * q[1]; }, p, 1e-6) < 1e-6);
    CHECK(ad::check_gradient([](auto q) { return decltype(q[0] * q[1])(5.0); }, p, 1e-6) == 0.0);
    CHECK_THROWS_AS((void)ad::check_gradient([](auto q) { return q[0]; }, p, 0.0), ConfigError);
    CHECK_THROWS_AS((void)ad::check_gradient(
                        [](std::span<const double> q) { return q[0] > 2.0 ? std::nan("") : 0.0; },
                        std::vector<double>{0.0, 0.0}, p, 1e-3),
                    NumericError);
}

namespace {

// f(g(x)) composed through jets vs central differences of the composed scalar function.
template <class F>
void check_unary_primitive(const char *name, F jet_fn, std::function<double(double)> scalar_fn, double lo,
                           double hi) {
    CAPTURE(name);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(lo, hi);
    for (int trial = 0; trial < 20; ++trial) {
        const double x = u(rng);
        // inner map g(x) = 0.8 x + 0.3 x^2 so the second-order chain term is exercised
        auto g = [](double y) { return 0.8 * y + 0.3 * y * y; };
        const auto jx = Jet2<double>::variable(x, 0, 1);
        const auto jg = jx * 0.8 + 0.3 * (jx * jx);
        const auto r = jet_fn(jg);
        for (double h : {1e-3, 5e-4}) {
            const double fp = scalar_fn(g(x + h));
            const double fm = scalar_fn(g(x - h));
            const double f0 = scalar_fn(g(x));
            const double d1 = (fp - fm) / (2 * h);
            const double d2 = (fp - 2 * f0 + fm) / (h * h);
            // O(h^2) truncation with O(1) derivatives; 1e-4 * h^-? margin covers both steps
            CHECK(std::abs(r.d1[0] - d1) < 50 * h * h * std::max(1.0, std::abs(d1)));
            CHECK(std::abs(r.d2[0] - d2) < 50 * h * h * std::max(1.0, std::abs(d2)) + 1e-8 / (h * h) * 1e-8);
        }
        CHECK(r.value == doctest::Approx(scalar_fn(g(x))).epsilon(1e-14));
    }
}

}  // namespace

TEST_CASE("jet: primitives match central differences") {
    check_unary_primitive("sin", [](const auto &j) { return ad::sin(j); }, [](double v) { return std::sin(v); }, -2,
                          2);
    check_unary_primitive("cos", [](const auto &j) { return ad::cos(j); }, [](double v) { return std::cos(v); }, -2,
                          2);
    check_unary_primitive("tanh", [](const auto &j) { return ad::tanh(j); }, [](double v) { return std::tanh(v); },
                          -2, 2);
    check_unary_primitive("exp", [](const auto &j) { return ad::exp(j); }, [](double v) { return std::exp(v); }, -1,
                          1);
    check_unary_primitive("sech", [](const auto &j) { return ad::sech(j); },
                          [](double v) { return 1.0 / std::cosh(v); }, -2, 2);
    check_unary_primitive("pow3", [](const auto &j) { return ad::pow(j, 3); },
                          [](double v) { return v * v * v; }, -1.5, 1.5);
    check_unary_primitive("pow-1", [](const auto &j) { return ad::pow(j, -1); },
                          [](double v) { return 1.0 / v; }, 0.5, 2.0);
    check_unary_primitive("div", [](const auto &j) { return Jet2<double>::constant(1.5, 1) / (j + 3.0); },
                          [](double v) { return 1.5 / (v + 3.0); }, -1, 1);
    check_unary_primitive("mul", [](const auto &j) { return ad::sin(j) * ad::exp(j); },
                          [](double v) { return std::sin(v) * std::exp(v); }, -1, 1);
}

TEST_CASE("jet: identity seed and product rule") {
    const auto x = Jet2<double>::variable(1.7, 0, 1);
    CHECK(x.value == 1.7);
    CHECK(x.d1[0] == 1.0);
    CHECK(x.d2[0] == 0.0);
    const auto f = Jet2<double>::variable(0.4, 0, 1);
    const auto sq = ad::sin(f) * ad::cos(f);
    // (sin cos)'' = -4 sin cos
    CHECK(sq.d2[0] == doctest::Approx(-4 * std::sin(0.4) * std::cos(0.4)).epsilon(1e-14));
}

TEST_CASE("eval_jet: affine neuron and tanh identity net") {
    net::MlpSpec lin{{1, 1}};
    auto p = net::ParamVector(lin);
    p.values()[0] = 2.5;   // w
    p.values()[1] = -0.3;  // b
    const std::vector<int> dims{0};
    const auto j = ad::eval_jet(lin, p, std::vector<double>{0.9}, dims);
    CHECK(j.value(0) == doctest::Approx(2.5 * 0.9 - 0.3));
    CHECK(j.d1(0, 0) == 2.5);
    CHECK(j.d2(0, 0, 0) == 0.0);

    // tanh(x) as [1,1,1]: hidden w=1,b=0, output w=1,b=0
    net::MlpSpec th{{1, 1, 1}};
    auto q = net::ParamVector(th);
    q.values()[0] = 1.0;
    q.values()[2] = 1.0;
    const auto k = ad::eval_jet(th, q, std::vector<double>{0.0}, dims);
    CHECK(k.value(0) == 0.0);
    CHECK(k.d1(0, 0) == 1.0);
    CHECK(k.d2(0, 0, 0) == 0.0);
}

TEST_CASE("eval_jet: errors") {
    net::MlpSpec spec{{2, 4, 1}};
    const auto p = random_params(spec, 1);
    const std::vector<double> x{0.1, 0.2};
    const std::vector<int> both{0, 1};
    const auto j = ad::eval_jet(spec, p, x, both);
    CHECK_THROWS_AS((void)j.d2(0, 0, 1), ConfigError);
    CHECK_THROWS_AS((void)ad::eval_jet(spec, p, x, std::vector<int>{2}), ConfigError);
    CHECK_THROWS_AS((void)ad::eval_jet(spec, p, x, std::vector<int>{0, 0}), ConfigError);
    net::MlpSpec other{{2, 5, 1}};
    CHECK_THROWS_AS((void)ad::eval_jet(other, p, x, both), ConfigError);
}

TEST_CASE("eval_jet: random MLP d1/d2 match finite differences (seed 7)") {
    for (auto act : {net::Activation::tanh, net::Activation::sin}) {
        net::MlpSpec spec{{2, 8, 8, 1}, act};
        const auto p = random_params(spec, 7);
        const std::vector<double> x{0.3, -0.6};
        const std::vector<int> dims{0, 1};
        const auto j = ad::eval_jet(spec, p, x, dims);
        for (int d = 0; d < 2; ++d) {
            const auto fd = fd_input(spec, p, x, d, 0, 1e-4);
            CHECK(rel_err(j.d1(0, d), fd.d1) < 1e-5);
            CHECK(rel_err(j.d2(0, d, d), fd.d2) < 1e-5);
        }
        CHECK(j.value(0) == net::forward(spec, p, x)[0]);
    }
}

TEST_CASE("eval_jet: parameter gradient of u_xx matches finite differences in theta") {
    net::MlpSpec spec{{1, 6, 6, 1}, net::Activation::tanh, true, 10};
    const auto p = random_params(spec, 5);
    const std::vector<double> x{0.45};
    const std::vector<int> dims{0};
    auto uxx = [&](auto theta) {
        using T = std::decay_t<decltype(theta[0])>;
        return ad::eval_jet<T>(spec, p, theta, x, dims).d2(0, 0, 0);
    };
    CHECK(ad::check_gradient(uxx, p.values(), 1e-5) < 1e-7);
}

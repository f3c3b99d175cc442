#include "nrpinn/problems/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <mutex>

namespace nrpinn::problems {

namespace {

// Orthonormal Hermite values p_0..p_n at x (weight exp(-s^2)); returns p_n, p_{n-1} and
// sum_{k<n} p_k^2.
struct HermiteEval {
    double pn;
    double pn1;
    double sumsq;
};

HermiteEval hermite_orthonormal(int n, double x) {
    double prev = 0.0;
    double cur = std::pow(kPi, -0.25);
    double sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
        sumsq += cur * cur;
        const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return {cur, prev, sumsq};
}

}  // namespace

// Golub-Welsch eigenvalues as starting nodes, polished by Newton on the orthonormal
// recurrence. Weights use w = 1 / sum_k p_k(x)^2, which keeps full relative accuracy even
// for the outermost nodes where eigenvector components underflow to rounding noise.
GaussHermite gauss_hermite(int n) {
    if (n < 2) {
        throw ConfigError("gauss_hermite: need at least 2 nodes");
    }
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        jac(i, i - 1) = jac(i - 1, i) = std::sqrt(i / 2.0);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericError("gauss_hermite: eigen decomposition failed");
    }
    GaussHermite g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = n / 2; i < n; ++i) {
        double x = es.eigenvalues()(i);
        for (int it = 0; it < 4; ++it) {
            // p_n' = sqrt(2n) p_{n-1}
            const auto h = hermite_orthonormal(n, x);
            x -= h.pn / (std::sqrt(2.0 * n) * h.pn1);
        }
        if (n % 2 == 1 && i == n / 2) {
            x = 0.0;
        }
        const double w = 1.0 / hermite_orthonormal(n, x).sumsq;
        g.nodes[i] = x;
        g.weights[i] = w;
        g.nodes[n - 1 - i] = -x;
        g.weights[n - 1 - i] = w;
    }
    return g;
}

BurgersColeHopf::BurgersColeHopf(double nu, int nodes) : nu_(nu) {
    if (!(nu > 0)) {
        throw UnsupportedError("burgers oracle: nu must be positive");
    }
    rule_ = gauss_hermite(nodes);
}

double BurgersColeHopf::operator()(double x, double t) const {
    if (t <= 0) {
        return -std::sin(kPi * x);
    }
    const double scale = std::sqrt(4.0 * nu_ * t);
    const double k = 1.0 / (2.0 * kPi * nu_);
    // exponents -cos(pi y) k can reach ~1e2; shift by their maximum before exponentiating
    double top = -1e300;
    const std::size_t n = rule_.nodes.size();
    thread_local std::vector<double> expo;
    expo.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = x - scale * rule_.nodes[i];
        expo[i] = -std::cos(kPi * y) * k;
        top = std::max(top, expo[i]);
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = x - scale * rule_.nodes[i];
        const double f = rule_.weights[i] * std::exp(expo[i] - top);
        num += std::sin(kPi * y) * f;
        den += f;
    }
    return -num / den;
}

double oracle_burgers_cole_hopf(double x, double t, double nu, int nodes) {
    static std::mutex mu;
    static std::map<std::pair<double, int>, BurgersColeHopf> cache;
    const BurgersColeHopf *oracle = nullptr;
    {
        std::lock_guard lock(mu);
        auto it = cache.find({nu, nodes});
        if (it == cache.end()) {
            it = cache.emplace(std::pair{nu, nodes}, BurgersColeHopf(nu, nodes)).first;
        }
        oracle = &it->second;
    }
    return (*oracle)(x, t);
}

}  // namespace nrpinn::problems

#include "nrpinn/problems/oracles.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <mutex>

namespace nrpinn::problems {

namespace {

constexpr double kLeft = -5.0;
constexpr double kPeriod = 10.0;

using cplx = std::complex<double>;

// FFTW planning is not thread-safe; executing a finished plan is.
std::mutex &planner_mutex() {
    static std::mutex mu;
    return mu;
}

class Fft {
  public:
    explicit Fft(int n) : n_(n), buf_(n) {
        std::lock_guard lock(planner_mutex());
        auto *data = reinterpret_cast<fftw_complex *>(buf_.data());
        // FFTW_ESTIMATE keeps the algorithm (and the rounding) identical across runs.
        fwd_ = fftw_plan_dft_1d(n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (fwd_ == nullptr || bwd_ == nullptr) {
            throw NumericError("schrodinger oracle: FFTW planning failed");
        }
    }
    Fft(const Fft &) = delete;
    Fft &operator=(const Fft &) = delete;
    ~Fft() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    std::vector<cplx> &buffer() { return buf_; }
    void forward() { fftw_execute(fwd_); }
    /// Inverse transform including the 1/n normalization.
    void backward() {
        fftw_execute(bwd_);
        const double s = 1.0 / n_;
        for (auto &v : buf_) {
            v *= s;
        }
    }

  private:
    int n_;
    std::vector<cplx> buf_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

// Signed integer frequency of FFT bin q.
int frequency(int q, int n) { return q <= n / 2 ? q : q - n; }

double mass_of(const std::vector<cplx> &h) {
    double m = 0.0;
    for (const auto &v : h) {
        m += std::norm(v);
    }
    return m * kPeriod / static_cast<double>(h.size());
}

struct Run {
    std::vector<std::vector<cplx>> snaps;
    std::size_t steps = 0;
};

// Strang splitting N(dt/2) L(dt) N(dt/2); the nonlinear half steps between two linear steps
// are merged except where a snapshot is taken.
Run integrate(double lambda, const SchrodingerOptions &o, int per_interval) {
    const int n = o.modes;
    const int intervals = o.snapshots - 1;
    const double dt = (kPi / 2) / (static_cast<double>(intervals) * per_interval);
    Fft fft(n);
    std::vector<cplx> lin(n);
    for (int q = 0; q < n; ++q) {
        const double k = 2 * kPi * frequency(q, n) / kPeriod;
        lin[q] = std::polar(1.0, -lambda * k * k * dt);
    }
    auto &h = fft.buffer();
    for (int j = 0; j < n; ++j) {
        h[j] = 2.0 / std::cosh(kLeft + kPeriod * j / n);
    }
    auto nonlinear = [&](double tau) {
        for (auto &v : h) {
            v *= std::polar(1.0, std::norm(v) * tau);
        }
    };
    Run run;
    run.snaps.push_back(h);
    for (int s = 0; s < intervals; ++s) {
        nonlinear(dt / 2);
        for (int step = 0; step < per_interval; ++step) {
            fft.forward();
            for (int q = 0; q < n; ++q) {
                h[q] *= lin[q];
            }
            fft.backward();
            nonlinear(step + 1 == per_interval ? dt / 2 : dt);
        }
        run.snaps.push_back(h);
    }
    run.steps = static_cast<std::size_t>(intervals) * per_interval;
    return run;
}

double max_diff(const std::vector<cplx> &a, const std::vector<cplx> &b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

}  // namespace

SchrodingerSolution oracle_schrodinger_spectral(double lambda, const SchrodingerOptions &opts) {
    if (opts.modes < 16 || opts.modes % 2 != 0) {
        throw ConfigError("schrodinger oracle: modes must be even and at least 16");
    }
    if (opts.snapshots < 2) {
        throw ConfigError("schrodinger oracle: need at least 2 snapshots");
    }
    int per = 4;
    Run prev = integrate(lambda, opts, per);
    double change = 0.0;
    for (int d = 0;; ++d) {
        if (d == opts.max_doublings) {
            throw NumericError(fmt::format("schrodinger oracle: step refinement did not settle "
                                           "(last change {:g})",
                                           change));
        }
        per *= 2;
        Run next = integrate(lambda, opts, per);
        change = max_diff(prev.snaps.back(), next.snaps.back());
        prev = std::move(next);
        if (change < opts.step_tol) {
            break;
        }
    }
    SchrodingerSolution sol;
    sol.lambda = lambda;
    for (int j = 0; j < opts.modes; ++j) {
        sol.xs.push_back(kLeft + kPeriod * j / opts.modes);
    }
    for (int k = 0; k < opts.snapshots; ++k) {
        sol.ts.push_back((kPi / 2) * k / (opts.snapshots - 1));
    }
    sol.h = std::move(prev.snaps);
    sol.steps = prev.steps;
    const double m0 = sol.mass(0);
    for (std::size_t k = 0; k < sol.h.size(); ++k) {
        const double drift = std::abs(sol.mass(k) - m0) / m0;
        if (!(drift <= opts.drift_tol)) {
            throw NumericError(fmt::format("schrodinger oracle: mass drift {:g} at t={:g}", drift, sol.ts[k]));
        }
    }
    return sol;
}

double SchrodingerSolution::mass(std::size_t k) const { return mass_of(h.at(k)); }

std::complex<double> SchrodingerSolution::at(std::size_t k, double x) const {
    const int n = static_cast<int>(xs.size());
    Fft fft(n);
    fft.buffer() = h.at(k);
    fft.forward();
    const auto &c = fft.buffer();
    const double phase = 2 * kPi * (x - kLeft) / kPeriod;
    cplx acc = 0.0;
    for (int q = 0; q < n; ++q) {
        const int f = frequency(q, n);
        if (2 * f == n) {
            acc += c[q] * std::cos(f * phase);  // split Nyquist mode keeps the interpolant real-symmetric
        } else {
            acc += c[q] * std::polar(1.0, f * phase);
        }
    }
    return acc / static_cast<double>(n);
}

Grid2d SchrodingerSolution::modulus_grid() const {
    Grid2d g;
    g.xs = xs;
    g.ys = ts;
    g.values.resize(xs.size() * ts.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t k = 0; k < ts.size(); ++k) {
            g.at(i, k) = std::abs(h[k][i]);
        }
    }
    return g;
}

}  // namespace nrpinn::problems

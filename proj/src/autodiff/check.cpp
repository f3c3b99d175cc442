#include "nrpinn/autodiff/check.hpp"

#include "nrpinn/autodiff/eval_jet.hpp"
#include "nrpinn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace nrpinn::ad {

double check_gradient(const std::function<double(std::span<const double>)> &f,
                      std::span<const double> analytic, std::span<const double> params, double step) {
    if (!(step > 0.0)) {
        throw ConfigError("check_gradient: step must be positive");
    }
    if (analytic.size() != params.size()) {
        throw ConfigError("check_gradient: gradient length mismatch");
    }
    std::vector<double> p(params.begin(), params.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + step;
        const double up = f(p);
        p[i] = saved - step;
        const double down = f(p);
        p[i] = saved;
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw NumericError("check_gradient: non-finite evaluation at coordinate " + std::to_string(i));
        }
        const double numeric = (up - down) / (2.0 * step);
        worst = std::max(worst, std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric)));
    }
    return worst;
}

void check_tracked(const net::MlpSpec &spec, std::span<const int> tracked) {
    if (static_cast<int>(tracked.size()) > kMaxDirs) {
        throw ConfigError("at most " + std::to_string(kMaxDirs) + " tracked input dimensions");
    }
    std::unordered_set<int> seen;
    for (int d : tracked) {
        if (d < 0 || d >= spec.input_dim()) {
            throw ConfigError("tracked dimension " + std::to_string(d) + " outside the input");
        }
        if (!seen.insert(d).second) {
            throw ConfigError("tracked dimension " + std::to_string(d) + " listed twice");
        }
    }
}

}  // namespace nrpinn::ad

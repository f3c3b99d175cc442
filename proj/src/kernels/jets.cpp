#include "nrpinn/kernels/jets.hpp"

#include "nrpinn/autodiff/jet.hpp"
#include "nrpinn/errors.hpp"

#include <algorithm>

namespace nrpinn::kernels {

Tracking Tracking::first_order(std::vector<int> dims) {
    Tracking t;
    t.second.assign(dims.size(), false);
    t.dims = std::move(dims);
    return t;
}

Tracking Tracking::with_second(std::vector<int> dims, std::vector<bool> second) {
    Tracking t{std::move(dims), std::move(second)};
    if (t.second.size() != t.dims.size()) {
        throw ConfigError("tracking: second-order flags do not match the tracked dims");
    }
    return t;
}

int Tracking::second_count() const {
    return static_cast<int>(std::count(second.begin(), second.end(), true));
}

void Tracking::validate(int input_dim) const {
    if (second.size() != dims.size()) {
        throw ConfigError("tracking: second-order flags do not match the tracked dims");
    }
    if (dir_count() > ad::kMaxDirs) {
        throw ConfigError("tracking: too many derivative directions");
    }
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 0 || dims[i] >= input_dim) {
            throw ConfigError("tracking: dimension " + std::to_string(dims[i]) + " outside the input");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (dims[i] == dims[j]) {
                throw ConfigError("tracking: dimension listed twice");
            }
        }
    }
}

OutputJets OutputJets::zeros(int outputs, Eigen::Index points, const Tracking &tracking) {
    OutputJets j;
    j.value = Eigen::MatrixXd::Zero(outputs, points);
    for (int k = 0; k < tracking.dir_count(); ++k) {
        j.d1.push_back(Eigen::MatrixXd::Zero(outputs, points));
        j.d2.push_back(tracking.second[k] ? Eigen::MatrixXd::Zero(outputs, points) : Eigen::MatrixXd());
    }
    return j;
}

namespace {

void check_inputs(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
                  const Tracking &tracking) {
    net::check_layout(spec, params);
    tracking.validate(spec.input_dim());
    if (points.rows() != spec.input_dim()) {
        throw ConfigError("points have " + std::to_string(points.rows()) + " coordinates, network expects " +
                          std::to_string(spec.input_dim()));
    }
}

}  // namespace

OutputJets forward(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
                   const Tracking &tracking, Backend backend) {
    check_inputs(spec, params, points, tracking);
    return backend == Backend::reference ? detail::forward_reference(spec, params, points, tracking)
                                         : detail::forward_openmp(spec, params, points, tracking);
}

double value_and_grad(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
                      const Tracking &tracking, const LossHead &head, std::span<double> grad, Backend backend) {
    check_inputs(spec, params, points, tracking);
    if (grad.size() != params.size()) {
        throw ConfigError("gradient buffer length mismatch");
    }
    return backend == Backend::reference
               ? detail::value_and_grad_reference(spec, params, points, tracking, head, grad, true)
               : detail::value_and_grad_openmp(spec, params, points, tracking, head, grad, true);
}

double value(const net::MlpSpec &spec, const net::ParamVector &params, const Points &points,
             const Tracking &tracking, const LossHead &head, Backend backend) {
    check_inputs(spec, params, points, tracking);
    std::vector<double> scratch(params.size(), 0.0);
    return backend == Backend::reference
               ? detail::value_and_grad_reference(spec, params, points, tracking, head, scratch, false)
               : detail::value_and_grad_openmp(spec, params, points, tracking, head, scratch, false);
}

}  // namespace nrpinn::kernels

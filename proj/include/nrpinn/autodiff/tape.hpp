#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace nrpinn::ad {

class Tape;

/// Scalar recorded on a Tape. A Var without a tape is a constant.
class Var {
  public:
    Var() = default;
    Var(double constant) : value_(constant) {}  // NOLINT(google-explicit-constructor)

    [[nodiscard]] double value() const { return value_; }
    [[nodiscard]] bool is_constant() const { return tape_ == nullptr; }
    [[nodiscard]] Tape *tape() const { return tape_; }
    [[nodiscard]] std::uint32_t index() const { return index_; }

  private:
    friend class Tape;
    Var(double value, Tape *tape, std::uint32_t index) : value_(value), tape_(tape), index_(index) {}

    double value_ = 0.0;
    Tape *tape_ = nullptr;
    std::uint32_t index_ = 0;
};

/// Reverse-mode record of scalar operations. Each node has at most two parents.
/// Not thread-safe; use one tape per thread.
class Tape {
  public:
    Tape() = default;
    Tape(const Tape &) = delete;
    Tape &operator=(const Tape &) = delete;

    Var variable(double value);
    std::vector<Var> variables(std::span<const double> values);

    /// Drops all nodes; previously created Vars become dangling.
    void clear() { nodes_.clear(); }
    void reserve(std::size_t n) { nodes_.reserve(n); }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }

    /// Adjoint of every node w.r.t. `output`, written into `adjoint` (resized to size()).
    void backward(const Var &output, std::vector<double> &adjoint) const;

    Var unary(double value, const Var &a, double da);
    Var binary(double value, const Var &a, double da, const Var &b, double db);

  private:
    static constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();

    struct Node {
        std::uint32_t lhs;
        std::uint32_t rhs;
        double dlhs;
        double drhs;
    };

    std::vector<Node> nodes_;
};

/// d(loss)/d(wrt[i]) for every leaf. Throws NumericError naming `term` when the loss or
/// any gradient entry is not finite.
[[nodiscard]] std::vector<double> grad_params(const Var &loss, std::span<const Var> wrt,
                                              const std::string &term = "loss");

// Arithmetic. Constant-only operands never touch a tape.
Var operator+(const Var &a, const Var &b);
Var operator-(const Var &a, const Var &b);
Var operator*(const Var &a, const Var &b);
Var operator/(const Var &a, const Var &b);
Var operator-(const Var &a);
inline Var &operator+=(Var &a, const Var &b) { return a = a + b; }
inline Var &operator-=(Var &a, const Var &b) { return a = a - b; }
inline Var &operator*=(Var &a, const Var &b) { return a = a * b; }
inline Var &operator/=(Var &a, const Var &b) { return a = a / b; }

Var sin(const Var &a);
Var cos(const Var &a);
Var tanh(const Var &a);
Var exp(const Var &a);
Var sech(const Var &a);
Var sqrt(const Var &a);
Var pow(const Var &a, int n);

inline double value_of(double x) { return x; }
inline double value_of(const Var &x) { return x.value(); }

}  // namespace nrpinn::ad

namespace nrpinn {
// Scalar overloads so templated code can call sech/pow(x, int) on plain doubles.
inline double sech(double x) { return 1.0 / std::cosh(x); }
}  // namespace nrpinn

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hawkesnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class SplineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Normalized (partition-of-unity) B-spline basis on [a1, a2] with equally
// spaced interior knots, clamped boundary. `order` is the number of
// coefficients per polynomial piece, so order 1 gives step functions and
// order 4 gives cubic splines. dimension = order + interior knot count.
//
// Evaluation outside [a1, a2] returns zeros: convolution features query lags
// past the kernel support and expect the basis to vanish there.
//
// When first_element_constant is set, the first basis element is replaced by
// the constant function 1 (the sum of all elements); together with elements
// 2..m the span is unchanged. Used by the constant-background test.
class SplineBasis {
public:
    SplineBasis() = default;

    static SplineBasis make(int order, int dimension, double a1, double a2);
    static SplineBasis make_constant_first(int order, int dimension,
                                           double a1, double a2);

    int order() const { return order_; }
    int dimension() const { return dimension_; }
    double a1() const { return a1_; }
    double a2() const { return a2_; }
    bool first_element_constant() const { return constant_first_; }
    // Interior knots plus both endpoints, ascending.
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    // Full clamped knot vector.
    const std::vector<double>& knots() const { return knots_; }

    // phi(t); all-zero outside [a1, a2].
    Vector eval(double t) const;

    // Writes the order() nonzero values into values[0..order) and returns the
    // index of the first nonzero basis element, or -1 if t is outside the
    // interval. Fast path for feature assembly.
    int eval_nonzero(double t, double* values) const;

    // Exact integrals of each basis element over [a1, a2].
    Vector integrals() const;

    // Exact (per-span Gauss-Legendre) integral of phi phi^T, optionally
    // weighted by a nonnegative function.
    Matrix gram(const std::function<double(double)>* weight = nullptr) const;

private:
    int order_ = 0;
    int dimension_ = 0;
    double a1_ = 0.0, a2_ = 0.0;
    bool constant_first_ = false;
    std::vector<double> knots_;
    std::vector<double> breakpoints_;
};

}  // namespace hawkesnet

#include "hawkesnet/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hawkesnet {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            // Legendre polynomial and derivative by recurrence.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

SplineBasis SplineBasis::make(int order, int dimension, double a1, double a2) {
    if (order < 1) throw SplineError("spline order must be >= 1");
    if (dimension < order)
        throw SplineError("spline dimension must be >= order");
    if (!(a1 < a2)) throw SplineError("invalid interval: a1 must be < a2");

    SplineBasis b;
    b.order_ = order;
    b.dimension_ = dimension;
    b.a1_ = a1;
    b.a2_ = a2;

    const int n_interior = dimension - order;
    b.breakpoints_.resize(n_interior + 2);
    for (int i = 0; i <= n_interior + 1; ++i)
        b.breakpoints_[i] = a1 + (a2 - a1) * i / (n_interior + 1);
    b.breakpoints_.front() = a1;
    b.breakpoints_.back() = a2;

    // Clamped knot vector: endpoints with multiplicity `order`.
    b.knots_.reserve(dimension + order);
    for (int i = 0; i < order; ++i) b.knots_.push_back(a1);
    for (int i = 1; i <= n_interior; ++i) b.knots_.push_back(b.breakpoints_[i]);
    for (int i = 0; i < order; ++i) b.knots_.push_back(a2);
    return b;
}

SplineBasis SplineBasis::make_constant_first(int order, int dimension,
                                             double a1, double a2) {
    if (dimension < 2)
        throw SplineError("constant-first basis needs dimension >= 2");
    SplineBasis b = make(order, dimension, a1, a2);
    b.constant_first_ = true;
    return b;
}

int SplineBasis::eval_nonzero(double t, double* values) const {
    if (t < a1_ || t > a2_) return -1;

    // Knot span index: largest i with knots[i] <= t < knots[i+1], with the
    // right endpoint folded into the last span.
    const int k = order_;
    int span;
    if (t >= knots_[dimension_]) {
        span = dimension_ - 1;
    } else {
        // knots_[k-1 .. dimension_] delimit the spans.
        span = int(std::upper_bound(knots_.begin() + k, knots_.begin() + dimension_, t) -
                   knots_.begin()) - 1;
    }

    // Cox-de Boor (basis funs at span), order k: values for indices
    // span-k+1 .. span.
    std::array<double, 32> left{}, right{};
    values[0] = 1.0;
    for (int j = 1; j < k; ++j) {
        left[j] = t - knots_[span + 1 - j];
        right[j] = knots_[span + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom > 0.0 ? values[r] / denom : 0.0;
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    return span - k + 1;
}

Vector SplineBasis::eval(double t) const {
    Vector phi = Vector::Zero(dimension_);
    double vals[32];
    const int first = eval_nonzero(t, vals);
    if (first < 0) return phi;
    for (int i = 0; i < order_; ++i) phi[first + i] = vals[i];
    if (constant_first_) {
        double s = 0.0;
        for (int i = 0; i < order_; ++i) s += vals[i];
        // Partition of unity: s == 1 inside the interval.
        phi[0] = s;
    }
    return phi;
}

Vector SplineBasis::integrals() const {
    const GaussRule rule = gauss_legendre(order_ + 1);
    Vector out = Vector::Zero(dimension_);
    double vals[32];
    for (size_t s = 0; s + 1 < breakpoints_.size(); ++s) {
        const double lo = breakpoints_[s], hi = breakpoints_[s + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (size_t q = 0; q < rule.x.size(); ++q) {
            const double t = mid + half * rule.x[q];
            const int first = eval_nonzero(t, vals);
            const double w = half * rule.w[q];
            for (int i = 0; i < order_; ++i) out[first + i] += w * vals[i];
        }
    }
    if (constant_first_) {
        // First element is identically 1; elements 2..m unchanged.
        out[0] = a2_ - a1_;
    }
    return out;
}

Matrix SplineBasis::gram(const std::function<double(double)>* weight) const {
    // Products of two order-k splines are piecewise polynomials of degree
    // 2(k-1); k+1 Gauss points per span integrate them exactly. Weighted
    // integrals use a few more points.
    const int nq = weight ? 4 * order_ + 4 : order_ + 1;
    const GaussRule rule = gauss_legendre(nq);
    Matrix g = Matrix::Zero(dimension_, dimension_);
    double vals[32];
    Vector phi(dimension_);
    for (size_t s = 0; s + 1 < breakpoints_.size(); ++s) {
        const double lo = breakpoints_[s], hi = breakpoints_[s + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (int q = 0; q < nq; ++q) {
            const double t = mid + half * rule.x[q];
            double w = half * rule.w[q];
            if (weight) w *= (*weight)(t);
            phi.setZero();
            const int first = eval_nonzero(t, vals);
            double sum = 0.0;
            for (int i = 0; i < order_; ++i) {
                phi[first + i] = vals[i];
                sum += vals[i];
            }
            if (constant_first_) phi[0] = sum;
            g.selfadjointView<Eigen::Upper>().rankUpdate(phi, w);
        }
    }
    g = g.selfadjointView<Eigen::Upper>();
    return g;
}

}  // namespace hawkesnet

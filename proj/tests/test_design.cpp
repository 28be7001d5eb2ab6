#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <hawkesnet/design.hpp>
#include <hawkesnet/model.hpp>
#include <hawkesnet/simulate.hpp>
#include <sstream>

#include "oracles/oracles.hpp"

using namespace hawkesnet;

namespace {
EventData small_events() {
    const ModelSpec m = make_preset(Preset::Setting1_2, 12, 2.0, 21);
    return simulate(m, 22);
}
}  // namespace

TEST_CASE("gram matrix is symmetric positive semidefinite") {
    const EventData ev = small_events();
    const DesignCache d = build_design(ev, 4, 5, 4, 4, 0.01);
    CHECK((d.G - d.G.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(d.G);
    const double max_ev = es.eigenvalues().maxCoeff();
    CHECK(es.eigenvalues().minCoeff() > -1e-10 * max_ev);
}

TEST_CASE("alpha targets are exact event sums") {
    const EventData ev = small_events();
    const DesignCache d = build_design(ev, 4, 5, 4, 4, 0.01);
    const int j = 1;
    Vector ref = Vector::Zero(d.dim);
    for (double t : ev.times[j]) {
        ref.head(d.m0()) += d.basis0.eval(t);
        for (int k = 0; k < ev.p; ++k) {
            Vector acc = Vector::Zero(d.m1());
            for (double u : ev.times[k]) {
                if (u >= t) break;
                if (t - u > 0.01) continue;
                acc += d.basis1.eval(t - u);
            }
            ref.segment(d.m0() + k * d.m1(), d.m1()) += acc;
        }
    }
    ref /= d.horizon_T;
    CHECK((d.alpha[j] - ref).lpNorm<Eigen::Infinity>() <
          1e-10 * (1.0 + ref.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("compute_features matches brute force") {
    const EventData ev = small_events();
    const SplineBasis b1 = SplineBasis::make(4, 4, 0.0, 0.01);
    for (double t : {0.3, 0.7001, 1.5, 1.99}) {
        const Vector fast = compute_features(ev, b1, t);
        Vector ref = Vector::Zero(ev.p * 4);
        for (int k = 0; k < ev.p; ++k)
            for (double u : ev.times[k]) {
                if (u >= t) break;
                if (t - u > 0.01) continue;
                ref.segment(4 * k, 4) += b1.eval(t - u);
            }
        CHECK((fast - ref).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("background block uses the analytic gram") {
    const EventData ev = small_events();
    const DesignCache d = build_design(ev, 4, 6, 4, 4, 0.01);
    const Matrix exact = d.basis0.gram() / d.horizon_T;
    CHECK((d.G.topLeftCorner(6, 6) - exact).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("halving the quadrature step moves G below tolerance") {
    const EventData ev = small_events();
    DesignOptions a, b;
    a.grid_dt = 0.002;
    b.grid_dt = 0.001;
    const DesignCache da = build_design(ev, 4, 5, 4, 4, 0.01, a);
    const DesignCache db = build_design(ev, 4, 5, 4, 4, 0.01, b);
    const double drift = (da.G - db.G).lpNorm<Eigen::Infinity>();
    CHECK(drift < 1e-4 * da.G.lpNorm<Eigen::Infinity>());
}

TEST_CASE("loss is the quadratic form") {
    const EventData ev = small_events();
    const DesignCache d = build_design(ev, 4, 5, 4, 4, 0.01);
    Vector beta = Vector::Zero(d.dim);
    CHECK(d.loss(0, beta) == 0.0);
    beta.setConstant(0.01);
    const double expect = -2.0 * beta.dot(d.alpha[0]) + beta.dot(d.G * beta);
    CHECK(d.loss(0, beta) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("design loss matches the dense naive-loss oracle") {
    // Tiny instance, modest coefficients: the quadrature loss agrees with a
    // brute-force breakpoint-refined trapezoid evaluation.
    const ModelSpec m = make_preset(Preset::Setting1_2, 12, 1.0, 31);
    const EventData ev = simulate(m, 33);
    const DesignCache d = build_design(ev, 4, 4, 4, 4, 0.01);
    Vector beta = Vector::Zero(d.dim);
    for (int i = 0; i < d.dim; ++i)
        beta(i) = 0.05 * std::sin(0.7 * i + 0.3);
    const double fast = d.loss(2, beta);
    const double slow =
        oracles::naive_loss(ev, d.basis0, d.basis1, 2, beta, 20000);
    CHECK(fast == doctest::Approx(slow).epsilon(5e-6));
}

TEST_CASE("binary save/load round trip") {
    const EventData ev = small_events();
    const DesignCache d = build_design(ev, 4, 5, 4, 4, 0.01);
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    d.save(ss);
    const DesignCache r = DesignCache::load(ss);
    CHECK(r.dim == d.dim);
    CHECK(r.p == d.p);
    CHECK((r.G - d.G).lpNorm<Eigen::Infinity>() == 0.0);
    for (int j = 0; j < d.p; ++j)
        CHECK((r.alpha[j] - d.alpha[j]).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(r.event_counts == d.event_counts);
}

TEST_CASE("group offsets") {
    const EventData ev = small_events();
    const DesignCache d = build_design(ev, 4, 5, 4, 4, 0.01);
    CHECK(d.group_offset(0) == 0);
    CHECK(d.group_size(0) == 5);
    CHECK(d.group_offset(1) == 5);
    CHECK(d.group_offset(3) == 5 + 2 * 4);
    CHECK(d.group_size(3) == 4);
    CHECK(d.dim == 5 + 12 * 4);
}

#include <doctest.h>

#include <cmath>
#include <hawkesnet/inference.hpp>
#include <hawkesnet/model.hpp>
#include <hawkesnet/simulate.hpp>
#include <hawkesnet/special_functions.hpp>

using namespace hawkesnet;

TEST_CASE("chi-square upper tail against closed forms") {
    // dof 2: P(X > x) = exp(-x/2).
    for (double x : {0.1, 1.0, 3.0, 10.0})
        CHECK(chi_square_upper_tail(x, 2) ==
              doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
    // dof 1: P(X > x) = erfc(sqrt(x/2)).
    for (double x : {0.5, 2.0, 7.0})
        CHECK(chi_square_upper_tail(x, 1) ==
              doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-12));
    // dof 4: P(X > x) = exp(-x/2) (1 + x/2).
    for (double x : {1.0, 4.0, 9.0})
        CHECK(chi_square_upper_tail(x, 4) ==
              doctest::Approx(std::exp(-x / 2.0) * (1.0 + x / 2.0))
                  .epsilon(1e-12));
    CHECK(chi_square_upper_tail(0.0, 3) == doctest::Approx(1.0));
}

TEST_CASE("gamma_q endpoints and known value") {
    CHECK(gamma_q(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(gamma_q(2.5, 0.0) == doctest::Approx(1.0));
    CHECK(gamma_q(0.5, 100.0) < 1e-12);
}

TEST_CASE("test statistic pieces are coherent") {
    const ModelSpec m = make_preset(Preset::Setting3_1, 12, 20.0, 41);
    const EventData ev = simulate(m, 42);
    const BackgroundTestContext ctx(ev, 6, 4, 0.01);
    CHECK(ctx.m0_test() >= 6);  // under-smoothing inflates dimensions
    for (int j : {0, 5, 11}) {
        const BackgroundTest t = ctx.test_node(j);
        CHECK(t.s_stat >= 0.0);  // restricted loss >= free loss
        CHECK(t.lambda_bar > 0.0);
        CHECK(t.dof == ctx.m0_test() - 1);
        CHECK(t.statistic == doctest::Approx(t.s_stat / t.lambda_bar));
        CHECK(t.p_value >= 0.0);
        CHECK(t.p_value <= 1.0);
        CHECK(t.p_value ==
              doctest::Approx(chi_square_upper_tail(t.statistic, t.dof)));
    }
}

TEST_CASE("strong departures from constancy are rejected") {
    const ModelSpec m = make_preset(Preset::Setting3_2, 12, 20.0, 43);
    const EventData ev = simulate(m, 44);
    const BackgroundTestContext ctx(ev, 6, 4, 0.01);
    for (int j : {0, 3, 7}) CHECK(ctx.test_node(j).p_value < 0.01);
}

TEST_CASE("null p-values are not systematically tiny") {
    // A crude calibration smoke check (the full 200-replication calibration
    // lives in the acceptance suite).
    int below_5pct = 0, total = 0;
    for (int s = 0; s < 5; ++s) {
        const ModelSpec m = make_preset(Preset::Setting3_1, 12, 20.0, 50 + s);
        const EventData ev = simulate(m, 60 + s);
        const BackgroundTestContext ctx(ev, 6, 4, 0.01);
        for (int j = 0; j < ev.p; ++j) {
            if (ev.times[j].empty()) continue;
            ++total;
            if (ctx.test_node(j).p_value < 0.05) ++below_5pct;
        }
    }
    CHECK(total >= 50);
    CHECK(below_5pct <= total / 4);
}

TEST_CASE("one-shot wrapper matches the context") {
    const ModelSpec m = make_preset(Preset::Setting3_1, 12, 20.0, 70);
    const EventData ev = simulate(m, 71);
    const BackgroundTestContext ctx(ev, 6, 4, 0.01);
    const BackgroundTest a = ctx.test_node(4);
    const BackgroundTest b = test_background(ev, 4, 6, 4, 0.01);
    CHECK(a.statistic == doctest::Approx(b.statistic));
    CHECK(a.p_value == doctest::Approx(b.p_value));
}

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
// its measured values; the process exits nonzero if any requested criterion
// fails. Usage: hawkesnet-acceptance [N | all]   (N in 1..9)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <hawkesnet/design.hpp>
#include <hawkesnet/estimator.hpp>
#include <hawkesnet/fitted_model.hpp>
#include <hawkesnet/inference.hpp>
#include <hawkesnet/metrics.hpp>
#include <hawkesnet/model.hpp>
#include <hawkesnet/rng.hpp>
#include <hawkesnet/selection.hpp>
#include <hawkesnet/simulate.hpp>
#include <hawkesnet/spline.hpp>

#include "oracles/oracles.hpp"

using namespace hawkesnet;

namespace {

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0
                     : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

// One-sample Kolmogorov-Smirnov distance against U[0,1].
double ks_uniform(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = (double)x.size();
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        d = std::max(d, (i + 1) / n - x[i]);
        d = std::max(d, x[i] - i / n);
    }
    return d;
}

// Asymptotic Kolmogorov upper tail Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 l^2}.
double ks_p_value(double d, double n) {
    const double l = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::pow(-1.0, k - 1) *
                            std::exp(-2.0 * k * k * l * l);
        q += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, q));
}

// Two-sample KS distance between empirical distributions of integer counts.
double ks_two_sample_counts(const std::vector<long>& a,
                            const std::vector<long>& b) {
    long hi = 0;
    for (long x : a) hi = std::max(hi, x);
    for (long x : b) hi = std::max(hi, x);
    double d = 0.0, ca = 0.0, cb = 0.0;
    for (long v = 0; v <= hi; ++v) {
        ca += (double)std::count(a.begin(), a.end(), v) / a.size();
        cb += (double)std::count(b.begin(), b.end(), v) / b.size();
        d = std::max(d, std::abs(ca - cb));
    }
    return d;
}

// Penalized per-node selection followed by the unpenalized refit on the
// selected support (the pipeline's reporting estimator).
FittedModel fit_network(const EventData& ev, int order0, int m0, int order1,
                        int m1, double b) {
    const DesignCache d = build_design(ev, order0, m0, order1, m1, b);
    const BlockFactors f(d);
    std::vector<NodeFit> fits;
    for (int j = 0; j < ev.p; ++j) {
        if (ev.times[j].empty()) {
            NodeFit nf;
            nf.node_j = j;
            nf.beta = Vector::Zero(d.dim);
            nf.converged = true;
            fits.push_back(std::move(nf));
            continue;
        }
        const SelectResult sel = select_eta(f, j);
        fits.push_back(refit(f, j, sel.best.active_set));
    }
    return assemble_fitted(d, std::move(fits));
}

struct RepScores {
    std::vector<double> f1, fpr, mse_bg;
};

// Star-network replications with per-replication cubic basis selection.
RepScores run_star(Preset which, int reps) {
    RepScores out;
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t model_seed = 1 + 7919ull * r;
        const std::uint64_t sim_seed = 2 + 104729ull * r;
        const ModelSpec model = make_preset(which, 21, 10.0, model_seed);
        const EventData ev = simulate(model, sim_seed);
        BasisSelectOptions bo;  // cubic by default
        const BasisSelection dims =
            select_basis_dims(ev, {4, 5, 6, 7, 8}, {4, 5, 6}, 0.01, bo);
        const FittedModel fit = fit_network(ev, 4, dims.m0, 4, dims.m1, 0.01);
        const EdgeScores sc =
            edge_scores(fit.edge_set(), model.edge_set(), model.p);
        out.f1.push_back(sc.f1);
        out.fpr.push_back(sc.fpr);
        out.mse_bg.push_back(mse_background(fit, model));
        std::fprintf(stderr, "  rep %d: m0=%d m1=%d f1=%.3f fpr=%.4f\n", r,
                     dims.m0, dims.m1, sc.f1, sc.fpr);
    }
    return out;
}

bool criterion1() {
    const RepScores s = run_star(Preset::Setting1_1, 20);
    const double f1 = mean(s.f1), fpr = mean(s.fpr);
    const bool pass = f1 >= 0.70 && fpr <= 0.05;
    std::printf("criterion 1: %s (setting 1.1, 20 reps: mean F1=%.3f >= 0.70, "
                "mean FPR=%.4f <= 0.05)\n",
                pass ? "PASS" : "FAIL", f1, fpr);
    return pass;
}

bool criterion2() {
    const RepScores s = run_star(Preset::Setting1_2, 20);
    const double f1 = mean(s.f1), msebg = mean(s.mse_bg);
    const bool pass = f1 >= 0.70 && msebg <= 12.0;
    std::printf("criterion 2: %s (setting 1.2, 20 reps: mean F1=%.3f >= 0.70, "
                "mean MSE(background)=%.3f <= 12)\n",
                pass ? "PASS" : "FAIL", f1, msebg);
    return pass;
}

bool criterion3() {
    std::vector<double> f1s;
    for (int r = 0; r < 10; ++r) {
        const std::uint64_t model_seed = 1 + 7919ull * r;
        const std::uint64_t sim_seed = 2 + 104729ull * r;
        PresetOptions opts;
        opts.network = erdos_renyi_network(100, 0.025, model_seed);
        const ModelSpec model =
            make_preset(Preset::Setting2, 100, 20.0, model_seed, opts);
        const EventData ev = simulate(model, sim_seed);
        // The Setting 2 baselines oscillate through five full periods over
        // [0, T]; the background basis must resolve them (about five knots
        // per period), otherwise the unexplained oscillation aliases into
        // the co-oscillating transfer features as spurious edges.
        const FittedModel fit = fit_network(ev, 4, 24, 4, 4, 0.01);
        const EdgeScores sc =
            edge_scores(fit.edge_set(), model.edge_set(), model.p);
        f1s.push_back(sc.f1);
        std::fprintf(stderr, "  rep %d: f1=%.3f\n", r, sc.f1);
    }
    const double f1 = mean(f1s);
    const bool pass = f1 >= 0.80;
    std::printf("criterion 3: %s (Erdos-Renyi p=100, p_e=0.025, T=20, 10 "
                "reps: mean F1=%.3f >= 0.80)\n",
                pass ? "PASS" : "FAIL", f1);
    return pass;
}

bool criterion4() {
    std::vector<double> pvals;
    long rejected = 0, tested = 0;
    for (int r = 0; r < 200; ++r) {
        const ModelSpec model =
            make_preset(Preset::Setting3_1, 21, 20.0, 1 + 7919ull * r);
        const EventData ev = simulate(model, 2 + 104729ull * r);
        const BackgroundTestContext ctx(ev, 6, 4, 0.01);
        for (int j = 0; j < ev.p; ++j) {
            if (ev.times[j].empty()) continue;
            const double p = ctx.test_node(j).p_value;
            pvals.push_back(p);
            ++tested;
            if (p < 0.05) ++rejected;
        }
        if ((r + 1) % 50 == 0)
            std::fprintf(stderr, "  %d/200 replications\n", r + 1);
    }
    const double ks = ks_uniform(pvals);
    const double rej = (double)rejected / tested;
    const bool pass = ks < 0.08 && rej >= 0.02 && rej <= 0.10;
    std::printf("criterion 4: %s (null calibration, 200 reps, %ld p-values: "
                "KS=%.4f < 0.08, rejection=%.4f in [0.02, 0.10])\n",
                pass ? "PASS" : "FAIL", tested, ks, rej);
    return pass;
}

bool criterion5() {
    const int reps = 100, p = 21;
    std::vector<long> rej(p, 0), cnt(p, 0);
    for (int r = 0; r < reps; ++r) {
        PresetOptions opts;
        opts.rho = 1.0;
        const ModelSpec model =
            make_preset(Preset::Setting3_2, p, 20.0, 1 + 7919ull * r, opts);
        const EventData ev = simulate(model, 2 + 104729ull * r);
        const BackgroundTestContext ctx(ev, 6, 4, 0.01);
        for (int j = 0; j < p; ++j) {
            if (ev.times[j].empty()) continue;
            ++cnt[j];
            if (ctx.test_node(j).p_value < 0.05) ++rej[j];
        }
        if ((r + 1) % 25 == 0)
            std::fprintf(stderr, "  %d/100 replications\n", r + 1);
    }
    double min_rate = 1.0;
    for (int j = 0; j < p; ++j)
        if (cnt[j] > 0) min_rate = std::min(min_rate, (double)rej[j] / cnt[j]);
    const bool pass = min_rate >= 0.95;
    std::printf("criterion 5: %s (power at rho=1, 100 reps: min per-node "
                "rejection rate=%.3f >= 0.95)\n",
                pass ? "PASS" : "FAIL", min_rate);
    return pass;
}

bool criterion6() {
    std::map<std::pair<int, int>, int> votes;
    for (int s = 1; s <= 20; ++s) {
        const ModelSpec model = make_preset(Preset::Setting1_2, 21, 10.0, s);
        const EventData ev = simulate(model, s);
        BasisSelectOptions bo;
        bo.order0 = 3;
        bo.order1 = 3;
        const BasisSelection sel =
            select_basis_dims(ev, {3, 4, 5, 6}, {3, 4, 5, 6}, 0.01, bo);
        ++votes[{sel.m0, sel.m1}];
        std::fprintf(stderr, "  seed %d: (%d,%d)\n", s, sel.m0, sel.m1);
    }
    std::pair<int, int> modal = {0, 0};
    int best = -1;
    for (const auto& [pair, n] : votes)
        if (n > best) {
            best = n;
            modal = pair;
        }
    const bool pass = modal == std::pair<int, int>{4, 3};
    std::printf("criterion 6: %s (quadratic basis selection over 20 seeds: "
                "modal pair (%d,%d) == (4,3), %d/20 votes)\n",
                pass ? "PASS" : "FAIL", modal.first, modal.second, best);
    return pass;
}

bool criterion7() {
    double worst_gap = 0.0, worst_kkt = 0.0;
    Rng pick(2024);
    for (int i = 0; i < 50; ++i) {
        const int p = 2 + (int)pick.uniform_int(2);   // 2..3
        const int m = 3 + (int)pick.uniform_int(2);   // 3..4
        ModelSpec model;
        model.p = p;
        model.horizon_T = 2.0;
        for (int j = 0; j < p; ++j)
            model.backgrounds.push_back(
                BackgroundFunction::constant(pick.uniform(10.0, 30.0)));
        model.transfers[{p - 1, 0}] =
            TransferFunction::gamma_like(20000.0, 0.001, 500.0, 0.01);
        const EventData ev = simulate(model, 3000 + i);
        const DesignCache d = build_design(ev, 3, m, 3, m, 0.01);
        const BlockFactors f(d);
        const int j = (int)pick.uniform_int(p);
        const double eta = pick.uniform(0.1, 0.8) * eta_max(f, j);
        const NodeFit fit = fit_node(f, j, eta);

        std::vector<int> offsets, sizes;  // penalized groups only (k >= 1)
        for (int k = 1; k <= p; ++k) {
            offsets.push_back(d.group_offset(k));
            sizes.push_back(d.group_size(k));
        }
        const double f_bcd = oracles::penalized_objective(
            d.G, d.alpha[j], offsets, sizes, eta, fit.beta);
        const auto oracle = oracles::subgradient_solve(d.G, d.alpha[j],
                                                       offsets, sizes, eta,
                                                       1000000);
        worst_gap = std::max(worst_gap, std::abs(f_bcd - oracle.objective));
        worst_kkt = std::max(worst_kkt, kkt_residual(f, j, fit));
    }
    const bool pass = worst_gap < 1e-5 && worst_kkt < 1e-6;
    std::printf("criterion 7: %s (50 instances: max |objective gap|=%.2e < "
                "1e-5, max KKT residual=%.2e < 1e-6)\n",
                pass ? "PASS" : "FAIL", worst_gap, worst_kkt);
    return pass;
}

bool criterion8() {
    // (a) No-edge constant-background nodes are Poisson: inter-event times
    // pass a KS test against Exp(nu) at level 0.01 with Bonferroni across
    // nodes, for at least 9 of 10 seeds.
    const double nu = 5.0, T = 50.0;
    ModelSpec poisson_model;
    poisson_model.p = 3;
    poisson_model.horizon_T = T;
    for (int j = 0; j < 3; ++j)
        poisson_model.backgrounds.push_back(BackgroundFunction::constant(nu));
    int seeds_passing = 0;
    for (int s = 0; s < 10; ++s) {
        const EventData ev = simulate(poisson_model, 100 + s);
        bool ok = true;
        for (int j = 0; j < 3; ++j) {
            std::vector<double> u;
            double prev = 0.0;
            for (double t : ev.times[j]) {
                u.push_back(1.0 - std::exp(-nu * (t - prev)));
                prev = t;
            }
            const double d = ks_uniform(u);
            if (ks_p_value(d, (double)u.size()) < 0.01 / 3.0) ok = false;
        }
        if (ok) ++seeds_passing;
    }
    const bool pass_a = seeds_passing >= 9;

    // (b) Linear single-node mean rate: nu=2, self-kernel mass 0.5, so the
    // stationary rate is (1 - 0.5)^{-1} * 2 = 4, within 3 MC standard errors.
    ModelSpec linear;
    linear.p = 1;
    linear.horizon_T = 100.0;
    linear.backgrounds.push_back(BackgroundFunction::constant(2.0));
    const double mass =
        TransferFunction::gamma_like(20000.0, 0.001, 500.0, 0.01)
            .abs_integral();
    linear.transfers[{0, 0}] = TransferFunction::gamma_like(
        20000.0 * 0.5 / mass, 0.001, 500.0, 0.01);
    std::vector<double> rates;
    for (int s = 0; s < 80; ++s)
        rates.push_back((double)simulate(linear, 400 + s).times[0].size() /
                        100.0);
    const double m = mean(rates);
    double var = 0.0;
    for (double r : rates) var += (r - m) * (r - m);
    var /= (rates.size() - 1);
    const double se = std::sqrt(var / rates.size());
    const bool pass_b = std::abs(m - 4.0) <= 3.0 * se;

    // (c) Iterative-thinning vs direct thinning: per-node count-distribution
    // KS distance over 300 seeds at p=3, T=2.
    ModelSpec toy;
    toy.p = 3;
    toy.horizon_T = 2.0;
    for (int j = 0; j < 3; ++j)
        toy.backgrounds.push_back(BackgroundFunction::constant(8.0));
    toy.transfers[{1, 0}] =
        TransferFunction::gamma_like(20000.0, 0.001, 500.0, 0.01);
    toy.transfers[{2, 1}] =
        TransferFunction::gamma_like(-15000.0, 0.001, 500.0, 0.01);
    std::vector<std::vector<long>> direct(3), iterative(3);
    for (int s = 0; s < 300; ++s) {
        const EventData a = simulate(toy, 7000 + s);
        const EventData b = simulate_iterative(toy, 12, 9000 + s);
        for (int j = 0; j < 3; ++j) {
            direct[j].push_back((long)a.times[j].size());
            iterative[j].push_back((long)b.times[j].size());
        }
    }
    double max_ks = 0.0;
    for (int j = 0; j < 3; ++j)
        max_ks = std::max(max_ks, ks_two_sample_counts(direct[j], iterative[j]));
    const bool pass_c = max_ks <= 0.1;

    const bool pass = pass_a && pass_b && pass_c;
    std::printf("criterion 8: %s (Poisson KS: %d/10 seeds [need >= 9]; linear "
                "mean rate %.3f vs 4 within 3 se=%.3f: %s; sampler KS=%.3f <= "
                "0.1)\n",
                pass ? "PASS" : "FAIL", seeds_passing, m, 3.0 * se,
                pass_b ? "yes" : "no", max_ks);
    return pass;
}

bool criterion9() {
    // Partition of unity at 1e-10 and exact integrals at 1e-7.
    bool pou = true, integrals = true;
    for (int order : {1, 2, 3, 4}) {
        const SplineBasis b = SplineBasis::make(order, order + 4, 0.0, 0.01);
        for (int i = 0; i <= 2000; ++i) {
            const double t = 0.01 * i / 2000.0;
            if (std::abs(b.eval(t).sum() - 1.0) >= 1e-10) pou = false;
        }
        const Vector exact = b.integrals();
        for (int i = 0; i < b.dimension(); ++i) {
            const double ref = oracles::dense_quadrature(
                [&](double t) { return b.eval(t)(i); }, 0.0, 0.01, 200000);
            if (std::abs(exact(i) - ref) >= 1e-7) integrals = false;
        }
    }

    // Gram PSD and quadrature-step-halving drift on a simulated design.
    const ModelSpec model = make_preset(Preset::Setting1_2, 12, 2.0, 51);
    const EventData ev = simulate(model, 52);
    DesignOptions oa, ob;
    oa.grid_dt = 0.002;
    ob.grid_dt = 0.001;
    const DesignCache da = build_design(ev, 4, 5, 4, 4, 0.01, oa);
    const DesignCache db = build_design(ev, 4, 5, 4, 4, 0.01, ob);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(da.G);
    const bool psd =
        es.eigenvalues().minCoeff() > -1e-10 * es.eigenvalues().maxCoeff();
    const double drift = (da.G - db.G).lpNorm<Eigen::Infinity>();
    const double bound = 1e-4 * da.G.lpNorm<Eigen::Infinity>();
    const bool halving = drift < bound;

    const bool pass = pou && integrals && psd && halving;
    std::printf("criterion 9: %s (partition of unity @1e-10: %s; exact "
                "integrals @1e-7: %s; Gram PSD: %s; halving drift %.2e < "
                "%.2e)\n",
                pass ? "PASS" : "FAIL", pou ? "ok" : "violated",
                integrals ? "ok" : "violated", psd ? "ok" : "violated", drift,
                bound);
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string which = argc > 1 ? argv[1] : "all";
    bool (*fns[])() = {criterion1, criterion2, criterion3,
                       criterion4, criterion5, criterion6,
                       criterion7, criterion8, criterion9};
    bool ok = true;
    if (which == "all") {
        for (auto* fn : fns) ok = fn() && ok;
    } else {
        const int n = std::atoi(which.c_str());
        if (n < 1 || n > 9) {
            std::fprintf(stderr, "usage: %s [1-9|all]\n", argv[0]);
            return 2;
        }
        ok = fns[n - 1]();
    }
    return ok ? 0 : 1;
}

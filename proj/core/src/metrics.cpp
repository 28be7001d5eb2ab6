#include "hawkesnet/metrics.hpp"

#include <cmath>

namespace hawkesnet {

EdgeScores edge_scores(const EdgeSet& estimated, const EdgeSet& truth, int p) {
    EdgeScores s;
    long self_pairs = 0;
    for (const auto& e : estimated) {
        truth.count(e) ? ++s.tp : ++s.fp;
        if (e.first == e.second) ++self_pairs;
    }
    for (const auto& e : truth) {
        if (!estimated.count(e)) ++s.fn;
        if (e.first == e.second && !estimated.count(e)) ++self_pairs;
    }
    // Candidate universe: all ordered off-diagonal pairs, plus any self-pairs
    // actually present in either set.
    s.tn = (long)p * (p - 1) + self_pairs - s.tp - s.fp - s.fn;
    const long pos = s.tp + s.fn, neg = s.fp + s.tn, pred = s.tp + s.fp;
    s.precision = pred > 0 ? (double)s.tp / pred : 1.0;
    s.recall = pos > 0 ? (double)s.tp / pos : 1.0;
    s.fnr = 1.0 - s.recall;
    s.fpr = neg > 0 ? (double)s.fp / neg : 0.0;
    s.f1 = (2 * s.tp + s.fp + s.fn) > 0
               ? 2.0 * s.tp / (2.0 * s.tp + s.fp + s.fn)
               : 1.0;
    return s;
}

double mse_background(const FittedModel& fit, const ModelSpec& truth,
                      int n_grid) {
    const double T = truth.horizon_T;
    const double dt = T / n_grid;
    double total = 0.0;
    for (int j = 0; j < truth.p; ++j) {
        const Vector coef = fit.fits.at(j).beta.head(fit.m0());
        double acc = 0.0;
        for (int i = 0; i < n_grid; ++i) {
            const double t = (i + 0.5) * dt;
            const double diff = fit.basis0.eval(t).dot(coef) - truth.backgrounds[j](t);
            acc += diff * diff;
        }
        total += std::sqrt(acc * dt / T);
    }
    return total / truth.p;
}

double mse_transfer(const FittedModel& fit, const ModelSpec& truth,
                    int n_grid) {
    const double b = fit.basis1.a2();
    const double dx = b / n_grid;
    const EdgeSet est = fit.edge_set();
    EdgeSet pairs = truth.edge_set();
    pairs.insert(est.begin(), est.end());

    std::vector<double> per_node(truth.p, 0.0);
    static const TransferFunction kZero = TransferFunction::zero();
    for (const auto& [j, k] : pairs) {
        const bool have_est = est.count({j, k}) > 0;
        const auto it = truth.transfers.find({j, k});
        const TransferFunction& w =
            it != truth.transfers.end() ? it->second : kZero;
        double acc = 0.0;
        for (int i = 0; i < n_grid; ++i) {
            const double x = (i + 0.5) * dx;
            const double est_val = have_est ? fit.basis1.eval(x).dot(fit.transfer_coef(j, k)) : 0.0;
            const double diff = est_val - w(x);
            acc += diff * diff;
        }
        per_node[j] += acc * dx;
    }
    double total = 0.0;
    for (int j = 0; j < truth.p; ++j) total += std::sqrt(per_node[j]);
    return total / truth.p;
}

}  // namespace hawkesnet

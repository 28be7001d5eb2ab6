#include "hawkesnet/selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

namespace hawkesnet {

// (log p)^2 log T. With the refit-scored path the unit constant reproduces
// the reference selection accuracy; halving it (as appropriate when scoring
// by the penalized loss) lets borderline spurious groups through.
double default_alpha_T(int p, double T) {
    const double lp = std::log((double)p);
    return lp * lp * std::log(T);
}

namespace {

// The GIC penalty is per selected group, but the refit-loss gain a spurious
// group can extract from noise grows roughly linearly with its dimension.
// The default weight therefore scales with the transfer-basis dimension,
// referenced at m1 = 4 where the unit constant was calibrated.
constexpr double kAlphaRefM1 = 4.0;

double scaled_default_alpha_T(int p, double T, int m1) {
    return default_alpha_T(p, T) * (double)m1 / kAlphaRefM1;
}

}  // namespace

GicRecord gic(const DesignCache& design, const NodeFit& fit, double alpha_T) {
    const int j = fit.node_j;
    if (design.event_counts[j] == 0)
        throw EstimatorError("GIC undefined for a node with no events");
    GicRecord r;
    r.eta = fit.eta;
    r.loss = fit.loss_value;
    r.kappa = design.horizon_T / (double)design.event_counts[j];
    r.model_size = (int)fit.active_set.size();
    r.alpha_T = alpha_T;
    r.gic_value = r.loss * r.kappa + (alpha_T / design.horizon_T) * r.model_size;
    return r;
}

int model_size_cap(double T, double s0_scale) {
    const double denom = std::log(std::log(std::max(T, 2.72)));
    return (int)std::ceil(s0_scale * std::sqrt(T) / std::max(denom, 0.1));
}

SelectResult select_eta(const BlockFactors& factors, int j,
                        const SelectOptions& opts) {
    const DesignCache& d = factors.design();
    if (opts.n_grid < 2) throw EstimatorError("eta grid needs >= 2 points");
    const double alpha_T =
        opts.alpha_T >= 0
            ? opts.alpha_T
            : scaled_default_alpha_T(d.p, d.horizon_T, d.group_size(1));

    SelectResult out;
    out.eta_max = eta_max(factors, j);
    out.s0 = model_size_cap(d.horizon_T, opts.s0_scale);

    if (out.eta_max <= 0.0) {
        // Degenerate design (e.g. no cross terms); the empty model is exact.
        out.best = fit_node(factors, j, 0.0, opts.fit);
        out.records.push_back(gic(d, out.best, alpha_T));
        return out;
    }

    const double ratio =
        std::pow(opts.eta_min_ratio, 1.0 / (opts.n_grid - 1));

    // Supports repeat along the path; cache their refit losses.
    std::map<std::set<int>, double> refit_loss;

    Vector warm;
    bool have_best = false;
    double best_gic = 0.0;
    double eta = out.eta_max;
    for (int i = 0; i < opts.n_grid; ++i, eta *= ratio) {
        NodeFit fit = fit_node(factors, j, eta, warm, opts.fit);
        warm = fit.beta;
        GicRecord rec = gic(d, fit, alpha_T);
        if (opts.gic_on_refit) {
            auto it = refit_loss.find(fit.active_set);
            if (it == refit_loss.end())
                it = refit_loss
                         .emplace(fit.active_set,
                                  refit(factors, j, fit.active_set).loss_value)
                         .first;
            rec.loss = it->second;
            rec.gic_value = rec.loss * rec.kappa +
                            (alpha_T / d.horizon_T) * rec.model_size;
        }
        out.records.push_back(rec);
        const bool oversize = (int)fit.active_set.size() > out.s0;
        if (!oversize && (!have_best || rec.gic_value < best_gic)) {
            best_gic = rec.gic_value;
            out.best = std::move(fit);
            have_best = true;
        }
        if (oversize) break;  // descending further only grows the model
    }
    if (!have_best)
        throw EstimatorError("eta path produced no model within the size cap");
    return out;
}

BasisSelection select_basis_dims(const EventData& events,
                                 const std::vector<int>& m0_candidates,
                                 const std::vector<int>& m1_candidates,
                                 double support_b,
                                 const BasisSelectOptions& opts) {
    if (m0_candidates.empty() || m1_candidates.empty())
        throw EstimatorError("basis candidate lists must be nonempty");

    const int m0_max = *std::max_element(m0_candidates.begin(), m0_candidates.end());
    const int m1_max = *std::max_element(m1_candidates.begin(), m1_candidates.end());

    BasisSelection out;
    // Stage 1: initial supports at the largest pair.
    {
        const DesignCache d = build_design(events, opts.order0, m0_max,
                                           opts.order1, m1_max, support_b,
                                           opts.design);
        const BlockFactors factors(d);
        SelectOptions screen = opts.select;
        if (screen.alpha_T < 0)
            screen.alpha_T =
                opts.stage1_alpha_mult *
                scaled_default_alpha_T(events.p, d.horizon_T, m1_max);
        for (int j = 0; j < events.p; ++j) {
            if (events.times[j].empty()) {
                out.initial_supports.push_back({});
                continue;
            }
            out.initial_supports.push_back(
                select_eta(factors, j, screen).best.active_set);
        }
    }

    // Stage 2: refit every candidate pair on the fixed supports.
    double best = 0.0;
    bool have_best = false;
    for (int m0 : m0_candidates) {
        for (int m1 : m1_candidates) {
            const DesignCache d = build_design(events, opts.order0, m0,
                                               opts.order1, m1, support_b,
                                               opts.design);
            const BlockFactors factors(d);
            double total = 0.0;
            int n_nodes = 0;
            for (int j = 0; j < events.p; ++j) {
                if (events.times[j].empty()) continue;
                const NodeFit fit = refit(factors, j, out.initial_supports[j]);
                const double kappa =
                    d.horizon_T / (double)d.event_counts[j];
                const double phat = (double)(fit.beta.array() != 0.0).count();
                total += fit.loss_value * kappa +
                         phat * std::log(d.horizon_T) / d.horizon_T;
                ++n_nodes;
            }
            if (n_nodes > 0) total /= n_nodes;
            out.surface.push_back({(double)m0, (double)m1, total});
            if (!have_best || total < best) {
                best = total;
                out.m0 = m0;
                out.m1 = m1;
                have_best = true;
            }
        }
    }
    return out;
}

}  // namespace hawkesnet

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hawkesnet/estimator.hpp"

namespace hawkesnet {

struct GicRecord {
    double eta = 0.0;
    double gic_value = 0.0;
    double loss = 0.0;
    double kappa = 0.0;       // T / N_j(0,T]
    int model_size = 0;       // |active set|
    double alpha_T = 0.0;
};

// Base default alpha_T = (log p)^2 log(T). When SelectOptions::alpha_T is
// left negative, select_eta additionally scales this by m1/4: the refit-loss
// gain a spurious group can extract from noise grows with its dimension, so
// the penalty weight tracks the transfer-basis size (calibrated at m1 = 4).
double default_alpha_T(int p, double T);

// GIC(eta) = loss * kappa + (alpha_T / T) * model_size.
GicRecord gic(const DesignCache& design, const NodeFit& fit, double alpha_T);

struct SelectOptions {
    int n_grid = 50;
    double alpha_T = -1.0;       // < 0: default_alpha_T
    double eta_min_ratio = 1e-2; // eta_min = ratio * eta_max
    // Path stops once |active| exceeds ceil(s0_scale * sqrt(T)/loglog(T)).
    double s0_scale = 10.0;
    // Score each path point by the loss of the unpenalized refit restricted
    // to its support (the proxy criterion of the consistency analysis),
    // rather than the shrunk penalized loss. Much more stable: shrinkage at
    // the support-recovering eta otherwise inflates the loss and tips the
    // argmin toward the empty or the dense end of the path.
    bool gic_on_refit = true;
    FitOptions fit;
};

struct SelectResult {
    NodeFit best;
    std::vector<GicRecord> records;
    double eta_max = 0.0;
    int s0 = 0;
};

int model_size_cap(double T, double s0_scale);

// Warm-started geometric eta path from eta_max (provably empty) downward;
// returns the GIC-minimizing fit plus the full record list.
SelectResult select_eta(const BlockFactors& factors, int j,
                        const SelectOptions& opts = {});

struct BasisSelection {
    int m0 = 0;
    int m1 = 0;
    // One row per (m0, m1) pair: {m0, m1, bic summed over nodes}.
    std::vector<std::array<double, 3>> surface;
    std::vector<std::set<int>> initial_supports;  // per node
};

struct BasisSelectOptions {
    int order0 = 4;  // cubic
    int order1 = 4;
    // Stage-1 support screening runs at stage1_alpha_mult times the eta-path
    // alpha_T (only when select.alpha_T is left at its default). Spurious
    // groups admitted at the richest candidate pair are exactly the strongest
    // noise fitters, and their overfit advantage grows with the transfer
    // dimension, biasing the stage-2 comparison toward large m1; a stiffer
    // screen removes them while the true groups' margins remain large.
    double stage1_alpha_mult = 2.0;
    DesignOptions design;
    SelectOptions select;
};

// Two-stage selector: an initial penalized fit at the largest
// candidate pair fixes per-node supports; every candidate pair is then
// refitted on those supports and scored by
// BIC(m0,m1) = loss * kappa + ||beta||_0 log(T)/T, summed over nodes.
BasisSelection select_basis_dims(const EventData& events,
                                 const std::vector<int>& m0_candidates,
                                 const std::vector<int>& m1_candidates,
                                 double support_b,
                                 const BasisSelectOptions& opts = {});

}  // namespace hawkesnet

#pragma once

#include "hawkesnet/fitted_model.hpp"
#include "hawkesnet/model.hpp"

namespace hawkesnet {

// Edge recovery scores over all ordered off-diagonal pairs (target, source);
// self-pairs join the candidate universe only when either set contains them.
struct EdgeScores {
    long tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0;
    double recall = 0.0;   // = 1 - FNR
    double f1 = 0.0;
    double fnr = 0.0;      // FN / (TP + FN)
    double fpr = 0.0;      // FP / (FP + TN)
};

EdgeScores edge_scores(const EdgeSet& estimated, const EdgeSet& truth, int p);

// (1/p) sum_j sqrt( (1/T) int_0^T (nu_hat_j - nu_j)^2 dt ), uniform-grid
// midpoint rule: per-node root mean squared curve error averaged over nodes.
double mse_background(const FittedModel& fit, const ModelSpec& truth,
                      int n_grid = 20000);

// (1/p) sum_j sqrt( sum_k int_0^b (w_hat_{j,k} - w_{j,k})^2 dx ), over the
// union of true and estimated edges (absent curves enter as zero).
double mse_transfer(const FittedModel& fit, const ModelSpec& truth,
                    int n_grid = 4000);

}  // namespace hawkesnet

#pragma once

#include <string>
#include <vector>

#include "hawkesnet/estimator.hpp"
#include "hawkesnet/model.hpp"

namespace hawkesnet {

// Estimation output packaged as curves: per-node coefficient vectors over the
// background basis on [0, T] and the transfer basis on [0, b].
struct FittedModel {
    SplineBasis basis0;
    SplineBasis basis1;
    int p = 0;
    double horizon_T = 0.0;
    std::vector<NodeFit> fits;  // one per node, index = node

    int m0() const { return basis0.dimension(); }
    int m1() const { return basis1.dimension(); }

    // Fitted background curve of node j at time t (no relu clipping).
    double background(int j, double t) const;
    // Fitted transfer curve for edge (target j, source k) at lag x.
    double transfer(int j, int k, double x) const;
    Vector transfer_coef(int j, int k) const;

    // Union of per-node active sets as (target, source) pairs.
    EdgeSet edge_set() const;

    std::string to_json() const;
    static FittedModel from_json(const std::string& text);
};

// Fit every node at fixed eta values chosen per node by GIC; convenience
// wrapper assembling a FittedModel from a design plus per-node fits.
FittedModel assemble_fitted(const DesignCache& design,
                            std::vector<NodeFit> fits);

}  // namespace hawkesnet

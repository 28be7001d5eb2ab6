#pragma once

#include <Eigen/Cholesky>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawkesnet/design.hpp"

namespace hawkesnet {

class EstimatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeFit {
    int node_j = -1;
    Vector beta;                 // length dim
    double eta = 0.0;
    std::set<int> active_set;    // groups k >= 1 with nonzero beta_{j,k}
    double loss_value = 0.0;     // -2 beta'alpha + beta'G beta
    int iterations = 0;
    bool converged = false;

    std::string to_json() const;
};

struct FitOptions {
    double tol = 1e-7;
    int max_iter = 500;
};

// Shared, immutable per-design state: Cholesky factors of every diagonal
// block, reused across sweeps, eta values, and nodes. Groups belonging to
// zero-event nodes have structurally zero blocks and stay frozen at zero.
class BlockFactors {
public:
    explicit BlockFactors(const DesignCache& design);

    const DesignCache& design() const { return *design_; }
    bool frozen(int k) const { return frozen_[k]; }  // k in 1..p
    const Eigen::LLT<Matrix>& block(int k) const { return llt_[k]; }  // k in 0..p

private:
    const DesignCache* design_;
    std::vector<Eigen::LLT<Matrix>> llt_;  // index 0 = background block
    std::vector<char> frozen_;
};

// Solves min_beta -2 beta'alpha_j + beta'G beta
//        + eta * sum_k sqrt(beta_k' G^(k,k) beta_k)
// by cyclic block coordinate descent with the closed-form standardized-group
// update. The background group is unpenalized.
NodeFit fit_node(const BlockFactors& factors, int j, double eta,
                 const FitOptions& opts = {});
NodeFit fit_node(const BlockFactors& factors, int j, double eta,
                 const Vector& warm_start, const FitOptions& opts);

// Warm-started descending path.
std::vector<NodeFit> fit_path(const BlockFactors& factors, int j,
                              const std::vector<double>& eta_grid,
                              const FitOptions& opts = {});

// Unpenalized least squares restricted to groups {0} union support
// (optionally restricting the background group to its first coefficient,
// for the constant-background null).
NodeFit refit(const BlockFactors& factors, int j, const std::set<int>& support,
              bool background_constant_only = false);

// Penalty threshold above which the penalized fit is provably empty.
double eta_max(const BlockFactors& factors, int j);

// Max KKT residual of a fit, for convergence certification in tests:
// active groups measure the stationarity residual, inactive groups the
// subgradient slack max(0, ||G_k^{-1/2} r_k|| - eta/2).
double kkt_residual(const BlockFactors& factors, int j, const NodeFit& fit);

}  // namespace hawkesnet

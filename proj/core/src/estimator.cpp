#include "hawkesnet/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace hawkesnet {

BlockFactors::BlockFactors(const DesignCache& design) : design_(&design) {
    if (!design.G.allFinite())
        throw EstimatorError("non-finite values in design matrix");
    const int p = design.p;
    llt_.resize(p + 1);
    frozen_.assign(p + 1, 0);
    for (int k = 0; k <= p; ++k) {
        const int off = design.group_offset(k);
        const int sz = design.group_size(k);
        Matrix block = design.G.block(off, off, sz, sz);
        if (k >= 1 && block.cwiseAbs().maxCoeff() == 0.0) {
            frozen_[k] = 1;  // zero-event node; group stays at zero
            continue;
        }
        Eigen::LLT<Matrix> llt(block);
        if (llt.info() != Eigen::Success) {
            // Diagonal jitter for numerically semidefinite blocks.
            const double jitter = 1e-10 * block.trace() / sz + 1e-300;
            llt.compute(block + jitter * Matrix::Identity(sz, sz));
            if (llt.info() != Eigen::Success) {
                if (k == 0)
                    throw EstimatorError("background Gram block is singular");
                frozen_[k] = 1;
                continue;
            }
        }
        llt_[k] = std::move(llt);
    }
}

namespace {

// Cyclic sweeps with an incrementally maintained gradient G beta.
// r_k = alpha_k - (G beta)_k + G^(k,k) beta_k is the partial residual seen
// by block k.
struct Bcd {
    const DesignCache& d;
    const BlockFactors& f;
    const Vector& alpha;
    Vector beta;
    Vector grad;

    Bcd(const BlockFactors& factors, int j, const Vector& start)
        : d(factors.design()), f(factors), alpha(d.alpha[j]), beta(start) {
        refresh();
    }

    void refresh() { grad.noalias() = d.G * beta; }

    double sweep(double eta) {
        double max_rel = 0.0;
        for (int k = 0; k <= d.p; ++k) {
            const int off = d.group_offset(k);
            const int sz = d.group_size(k);
            if (k >= 1 && f.frozen(k)) continue;

            Vector r = alpha.segment(off, sz) - grad.segment(off, sz);
            r.noalias() += d.G.block(off, off, sz, sz) * beta.segment(off, sz);

            Vector nb;
            if (k == 0) {
                nb = f.block(0).solve(r);
            } else {
                const Vector w = f.block(k).matrixL().solve(r);
                const double nw = w.norm();
                if (nw <= eta / 2.0)
                    nb = Vector::Zero(sz);
                else
                    nb = (1.0 - eta / (2.0 * nw)) * f.block(k).solve(r);
            }
            const Vector delta = nb - beta.segment(off, sz);
            const double dn = delta.norm();
            if (dn > 0.0) {
                beta.segment(off, sz) = nb;
                grad.noalias() += d.G.middleCols(off, sz) * delta;
            }
            max_rel = std::max(max_rel, dn / (1.0 + nb.norm()));
        }
        return max_rel;
    }
};

}  // namespace

NodeFit fit_node(const BlockFactors& factors, int j, double eta,
                 const Vector& warm_start, const FitOptions& opts) {
    const DesignCache& d = factors.design();
    if (j < 0 || j >= d.p) throw EstimatorError("node index out of range");
    if (eta < 0.0) throw EstimatorError("eta must be nonnegative");
    if (!d.alpha[j].allFinite())
        throw EstimatorError("non-finite values in design targets");

    Bcd bcd(factors, j,
            warm_start.size() == d.dim ? warm_start : Vector::Zero(d.dim));
    NodeFit fit;
    fit.node_j = j;
    fit.eta = eta;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        const double rel = bcd.sweep(eta);
        if ((it + 1) % 25 == 0) bcd.refresh();  // cap incremental drift
        if (rel < opts.tol) {
            fit.converged = true;
            ++it;
            break;
        }
    }
    fit.iterations = it;
    fit.beta = std::move(bcd.beta);
    for (int k = 1; k <= d.p; ++k)
        if (fit.beta.segment(d.group_offset(k), d.group_size(k))
                .cwiseAbs()
                .maxCoeff() > 0.0)
            fit.active_set.insert(k);
    fit.loss_value = d.loss(j, fit.beta);
    return fit;
}

NodeFit fit_node(const BlockFactors& factors, int j, double eta,
                 const FitOptions& opts) {
    return fit_node(factors, j, eta, Vector(), opts);
}

std::vector<NodeFit> fit_path(const BlockFactors& factors, int j,
                              const std::vector<double>& eta_grid,
                              const FitOptions& opts) {
    for (std::size_t i = 1; i < eta_grid.size(); ++i)
        if (!(eta_grid[i] < eta_grid[i - 1]))
            throw EstimatorError("eta grid must be strictly decreasing");
    std::vector<NodeFit> path;
    Vector warm;
    for (double eta : eta_grid) {
        NodeFit fit = fit_node(factors, j, eta, warm, opts);
        warm = fit.beta;
        path.push_back(std::move(fit));
    }
    return path;
}

NodeFit refit(const BlockFactors& factors, int j, const std::set<int>& support,
              bool background_constant_only) {
    const DesignCache& d = factors.design();
    if (j < 0 || j >= d.p) throw EstimatorError("node index out of range");

    std::vector<int> idx;
    if (background_constant_only) {
        if (!d.basis0.first_element_constant())
            throw EstimatorError(
                "constant-restricted refit needs a constant-first background basis");
        idx.push_back(0);
    } else {
        for (int i = 0; i < d.m0(); ++i) idx.push_back(i);
    }
    for (int k : support) {
        if (k < 1 || k > d.p) throw EstimatorError("support index out of range");
        if (factors.frozen(k))
            throw EstimatorError("group " + std::to_string(k) +
                                 " has no events; cannot refit on it");
        const int off = d.group_offset(k);
        for (int i = 0; i < d.m1(); ++i) idx.push_back(off + i);
    }

    const int n = (int)idx.size();
    Matrix gs(n, n);
    Vector as(n);
    for (int a = 0; a < n; ++a) {
        as[a] = d.alpha[j][idx[a]];
        for (int c = 0; c < n; ++c) gs(a, c) = d.G(idx[a], idx[c]);
    }
    Eigen::LDLT<Matrix> ldlt(gs);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw EstimatorError("singular restricted design for node " +
                             std::to_string(j));
    const Vector sol = ldlt.solve(as);

    NodeFit fit;
    fit.node_j = j;
    fit.eta = 0.0;
    fit.beta = Vector::Zero(d.dim);
    for (int a = 0; a < n; ++a) fit.beta[idx[a]] = sol[a];
    fit.active_set = support;
    fit.converged = true;
    fit.iterations = 1;
    fit.loss_value = d.loss(j, fit.beta);
    return fit;
}

double eta_max(const BlockFactors& factors, int j) {
    const DesignCache& d = factors.design();
    // With the background group at its unpenalized optimum and every other
    // group at zero, group k's subgradient slack is ||G_k^{-1/2} r_k|| with
    // r_k = alpha_k - G^(k,0) beta_bg. Twice the largest slack makes the
    // all-zero configuration a BCD fixed point, hence the global optimum.
    const int m0 = d.m0();
    const Vector beta_bg = factors.block(0).solve(d.alpha[j].head(m0));
    double best = 0.0;
    for (int k = 1; k <= d.p; ++k) {
        if (factors.frozen(k)) continue;
        const int off = d.group_offset(k);
        const int sz = d.group_size(k);
        const Vector r = d.alpha[j].segment(off, sz) -
                         d.G.block(off, 0, sz, m0) * beta_bg;
        best = std::max(best, factors.block(k).matrixL().solve(r).norm());
    }
    return 2.0 * best * (1.0 + 1e-10);
}

double kkt_residual(const BlockFactors& factors, int j, const NodeFit& fit) {
    const DesignCache& d = factors.design();
    const Vector grad = d.G * fit.beta;
    const double scale = std::max(1.0, d.alpha[j].cwiseAbs().maxCoeff());
    double worst = 0.0;

    worst = std::max(worst, (grad.head(d.m0()) - d.alpha[j].head(d.m0()))
                                .cwiseAbs()
                                .maxCoeff() / scale);
    for (int k = 1; k <= d.p; ++k) {
        if (factors.frozen(k)) continue;
        const int off = d.group_offset(k);
        const int sz = d.group_size(k);
        const Vector beta_k = fit.beta.segment(off, sz);
        const Vector r_k = d.alpha[j].segment(off, sz) - grad.segment(off, sz) +
                           d.G.block(off, off, sz, sz) * beta_k;
        if (fit.active_set.count(k)) {
            const Matrix gk = d.G.block(off, off, sz, sz);
            const Vector gb = gk * beta_k;
            const double norm_k = std::sqrt(beta_k.dot(gb));
            const Vector resid = 2.0 * gb - 2.0 * r_k + fit.eta * gb / norm_k;
            worst = std::max(worst, resid.cwiseAbs().maxCoeff() / scale);
        } else {
            const double slack =
                factors.block(k).matrixL().solve(r_k).norm() - fit.eta / 2.0;
            worst = std::max(worst, slack / scale);
        }
    }
    return worst;
}

std::string NodeFit::to_json() const {
    nlohmann::json j;
    j["node"] = node_j;
    j["eta"] = eta;
    j["loss"] = loss_value;
    j["iterations"] = iterations;
    j["converged"] = converged;
    j["active_set"] = std::vector<int>(active_set.begin(), active_set.end());
    j["beta"] = std::vector<double>(beta.data(), beta.data() + beta.size());
    return j.dump();
}

}  // namespace hawkesnet

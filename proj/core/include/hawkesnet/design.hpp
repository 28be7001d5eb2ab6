#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "hawkesnet/events.hpp"
#include "hawkesnet/spline.hpp"

namespace hawkesnet {

class DesignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DesignOptions {
    double grid_dt = 0.0;        // 0: min(b / (4 m1), T / 5000)
    int n_threads = 1;
    bool exact_background_block = true;  // overwrite G^(0,0) with the analytic Gram
};

// Estimation statistics shared by every per-node fit: feature second moments
// G = (1/T) int Psi Psi^T dt (quadrature), per-node targets alpha_j (exact
// event sums), and the grid mean of Psi. The feature vector is
// Psi(t) = (phi0(t), Psi_1(t), ..., Psi_p(t)) with
// Psi_k(t) = sum_{u < t, t-u <= b} phi1(t-u) over events u of node k.
struct DesignCache {
    SplineBasis basis0;  // background basis on [0, T]
    SplineBasis basis1;  // transfer basis on [0, b]
    int p = 0;
    double horizon_T = 0.0;
    double grid_dt = 0.0;
    int dim = 0;  // m0 + p * m1

    Matrix G;                       // dim x dim, symmetric PSD
    std::vector<Vector> alpha;      // p vectors, length dim
    Vector psi_mean;                // (1/T) int Psi(t) dt on the grid
    std::vector<std::size_t> event_counts;

    int m0() const { return basis0.dimension(); }
    int m1() const { return basis1.dimension(); }
    // Coefficient offset of group k (k = 0 is the background group).
    int group_offset(int k) const { return k == 0 ? 0 : m0() + (k - 1) * m1(); }
    int group_size(int k) const { return k == 0 ? m0() : m1(); }

    // -2 beta' alpha_j + beta' G beta
    double loss(int j, const Vector& beta) const;

    // Versioned little-endian binary dump so fit/test runs can skip the
    // quadrature pass.
    void save(std::ostream& out) const;
    static DesignCache load(std::istream& in);
};

// Psi_k blocks only (length p * m1), by direct window sums.
Vector compute_features(const EventData& events, const SplineBasis& basis1,
                        double t);

DesignCache build_design(const EventData& events, const SplineBasis& basis0,
                         const SplineBasis& basis1,
                         const DesignOptions& opts = {});

// Convenience: equally spaced clamped bases of the given orders/dimensions.
DesignCache build_design(const EventData& events, int order0, int m0,
                         int order1, int m1, double support_b,
                         const DesignOptions& opts = {});

}  // namespace hawkesnet

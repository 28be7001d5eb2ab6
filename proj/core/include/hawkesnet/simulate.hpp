#pragma once

#include <cstdint>
#include <stdexcept>

#include "hawkesnet/events.hpp"
#include "hawkesnet/model.hpp"

namespace hawkesnet {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact sample from the model by Ogata-style modified thinning: a piecewise
// dominating rate (background sup over a short look-ahead window plus a
// positive-part bound over events still inside the kernel support) is
// refreshed after every accepted event and at window boundaries.
// Deterministic given (model, seed).
EventData simulate(const ModelSpec& model, std::uint64_t seed);

// The recursive thinning construction against a single fixed unit-rate planar
// Poisson field per node, realized lazily in height strips so every round
// thins the same field. Round 1 is an inhomogeneous Poisson process with rate
// relu(nu_j(t)); round n+1 recomputes the intensity from round n's events and
// re-thins. Distributional cross-check oracle for simulate().
EventData simulate_iterative(const ModelSpec& model, int n_iters,
                             std::uint64_t seed);

// psi_j(t) = nu_j(t) + sum_k sum_{u < t, t-u <= b} w_{j,k}(t-u), given event
// history; intensity is relu(psi). Shared by both simulators and tests.
double model_psi(const ModelSpec& model, int j,
                 const std::vector<std::vector<double>>& history, double t);

}  // namespace hawkesnet

#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hawkesnet/spline.hpp"

namespace hawkesnet {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Kernel by which past events of a source node shift a target node's
// intensity. Supported on [0, support_b]; zero outside.
class TransferFunction {
public:
    enum class Kind { Zero, GammaLike, Spline };

    TransferFunction() = default;

    static TransferFunction zero();
    // scale * (x + shift) * exp(1 - rate * x) on [0, b]. The standard
    // excitatory/inhibitory curves have this shape.
    static TransferFunction gamma_like(double scale, double shift, double rate,
                                       double b);
    static TransferFunction spline(SplineBasis basis, Vector coef);

    Kind kind() const { return kind_; }
    double support_b() const { return support_b_; }
    bool is_zero() const { return kind_ == Kind::Zero; }

    double operator()(double x) const;
    // Integral of |w| over [0, b].
    double abs_integral() const;
    // sup of max(w, 0) over [0, b].
    double positive_sup() const;
    // Squared L2 norm over [0, b].
    double l2sq() const;

    // Serialization hooks (JSON handled in model.cpp).
    double scale_ = 0.0, shift_ = 0.0, rate_ = 0.0;
    SplineBasis basis_;
    Vector coef_;

private:
    Kind kind_ = Kind::Zero;
    double support_b_ = 0.0;
    double abs_integral_ = 0.0;
    double positive_sup_ = 0.0;
};

// Baseline event rate absent interactions; strictly positive and bounded.
class BackgroundFunction {
public:
    enum class Kind { Constant, Sinusoid, Spline };

    BackgroundFunction() = default;

    static BackgroundFunction constant(double value);
    // offset + amplitude * sin(2 pi freq t / horizon)
    static BackgroundFunction sinusoid(double offset, double amplitude,
                                       double freq, double horizon);
    static BackgroundFunction spline(SplineBasis basis, Vector coef);

    Kind kind() const { return kind_; }
    double operator()(double t) const;
    // Exact sup over [t1, t2] (spline kind: coefficient-hull bound).
    double sup(double t1, double t2) const;
    double sup() const;  // global sup

    double offset_ = 0.0, amplitude_ = 0.0, freq_ = 0.0, horizon_ = 0.0;
    SplineBasis basis_;
    Vector coef_;

private:
    Kind kind_ = Kind::Constant;
};

using EdgeSet = std::set<std::pair<int, int>>;  // (target j, source k)

// Ground-truth generative model: intensity_j(t) =
//   relu( nu_j(t) + sum_k int_0^t w_{j,k}(t-u) dN_k(u) ).
struct ModelSpec {
    int p = 0;
    double horizon_T = 0.0;
    std::vector<BackgroundFunction> backgrounds;
    std::map<std::pair<int, int>, TransferFunction> transfers;  // (j,k) -> w
    std::string link = "relu";

    EdgeSet edge_set() const;
    double max_support_b() const;

    // Entry (j,k) = integral of |w_{j,k}| over its support.
    Matrix omega_matrix() const;

    // Lambda* = (I - Omega)^{-1} nu* 1: mean intensity of the dominating
    // process. Throws ModelError if the Neumann series diverges.
    Vector mean_intensity_bound(double nu_star) const;

    // Construction gate: the Neumann series sum Omega^k must converge, i.e.
    // spectral radius of Omega < 1.
    void validate() const;

    std::string to_json() const;
    static ModelSpec from_json(const std::string& text);
};

enum class Preset {
    Setting1_1,
    Setting1_2,
    Setting2,
    Setting3_1,
    Setting3_2,
};

Preset preset_from_name(const std::string& name);
std::string preset_name(Preset p);

struct PresetOptions {
    double rho = 1.0;          // Setting 3.2 departure from constant
    double freq = -1.0;        // sinusoid frequency; default 1 (Setting 1/3), 5 (Setting 2)
    EdgeSet network;           // Setting 2: supplied network (required)
};

// Reproduces the generative simulation settings; per-node baselines are
// drawn from the setting's normal law using `seed`.
ModelSpec make_preset(Preset which, int p, double T, std::uint64_t seed,
                      const PresetOptions& opts = {});

// Directed random networks over ordered pairs (j,k), j != k.
EdgeSet erdos_renyi_network(int p, double edge_prob, std::uint64_t seed);
// Out-degrees d sampled with P(d) proportional to d^{-(alpha+1)} on
// {1..p-1} by inverse CDF; targets uniform without replacement.
EdgeSet power_law_network(int p, double alpha, std::uint64_t seed);

}  // namespace hawkesnet

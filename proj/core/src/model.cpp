#include "hawkesnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "hawkesnet/rng.hpp"

namespace hawkesnet {

namespace {

// Composite Gauss-Legendre for smooth integrands on [lo, hi].
double integrate_smooth(const std::function<double(double)>& f, double lo,
                        double hi, int panels = 16, int order = 12) {
    // 12-point GL nodes/weights (positive half; symmetric).
    static const double xs[6] = {0.1252334085114689, 0.3678314989981802,
                                 0.5873179542866175, 0.7699026741943047,
                                 0.9041172563704749, 0.9815606342467192};
    static const double ws[6] = {0.2491470458134028, 0.2334925365383548,
                                 0.2031674267230659, 0.1600783285433462,
                                 0.1069393259953184, 0.0471753363865118};
    (void)order;
    double total = 0.0;
    for (int s = 0; s < panels; ++s) {
        const double a = lo + (hi - lo) * s / panels;
        const double b = lo + (hi - lo) * (s + 1) / panels;
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int i = 0; i < 6; ++i) {
            total += half * ws[i] * (f(mid + half * xs[i]) + f(mid - half * xs[i]));
        }
    }
    return total;
}

}  // namespace

TransferFunction TransferFunction::zero() { return TransferFunction(); }

TransferFunction TransferFunction::gamma_like(double scale, double shift,
                                              double rate, double b) {
    if (b <= 0.0) throw ModelError("transfer support must be positive");
    TransferFunction w;
    w.kind_ = Kind::GammaLike;
    w.support_b_ = b;
    w.scale_ = scale;
    w.shift_ = shift;
    w.rate_ = rate;
    w.abs_integral_ = integrate_smooth(
        [&](double x) { return std::abs(w(x)); }, 0.0, b);
    if (scale > 0.0) {
        // Unimodal: stationary point at x = 1/rate - shift.
        double best = std::max(w(0.0), w(b));
        if (rate > 0.0) {
            const double xstar = 1.0 / rate - shift;
            if (xstar > 0.0 && xstar < b) best = std::max(best, w(xstar));
        }
        w.positive_sup_ = std::max(0.0, best);
    } else {
        w.positive_sup_ = 0.0;
    }
    return w;
}

TransferFunction TransferFunction::spline(SplineBasis basis, Vector coef) {
    if (coef.size() != basis.dimension())
        throw ModelError("transfer coefficient length mismatch");
    TransferFunction w;
    w.kind_ = Kind::Spline;
    w.support_b_ = basis.a2();
    w.basis_ = std::move(basis);
    w.coef_ = std::move(coef);
    w.abs_integral_ = integrate_smooth(
        [&](double x) { return std::abs(w(x)); }, 0.0, w.support_b_, 64);
    // Convex-hull property: values are bounded by the max coefficient.
    w.positive_sup_ = std::max(0.0, w.coef_.maxCoeff());
    return w;
}

double TransferFunction::operator()(double x) const {
    if (x < 0.0 || x > support_b_ || kind_ == Kind::Zero) return 0.0;
    if (kind_ == Kind::GammaLike)
        return scale_ * (x + shift_) * std::exp(1.0 - rate_ * x);
    double vals[32];
    const int first = basis_.eval_nonzero(x, vals);
    if (first < 0) return 0.0;
    double v = 0.0;
    for (int i = 0; i < basis_.order(); ++i) v += vals[i] * coef_[first + i];
    return v;
}

double TransferFunction::abs_integral() const { return abs_integral_; }
double TransferFunction::positive_sup() const { return positive_sup_; }

double TransferFunction::l2sq() const {
    if (kind_ == Kind::Zero) return 0.0;
    return integrate_smooth([&](double x) { const double v = (*this)(x); return v * v; },
                            0.0, support_b_, 64);
}

BackgroundFunction BackgroundFunction::constant(double value) {
    if (value < 0.0) throw ModelError("background must be nonnegative");
    BackgroundFunction f;
    f.kind_ = Kind::Constant;
    f.offset_ = value;
    return f;
}

BackgroundFunction BackgroundFunction::sinusoid(double offset, double amplitude,
                                                double freq, double horizon) {
    if (horizon <= 0.0) throw ModelError("sinusoid horizon must be positive");
    BackgroundFunction f;
    f.kind_ = Kind::Sinusoid;
    f.offset_ = offset;
    f.amplitude_ = amplitude;
    f.freq_ = freq;
    f.horizon_ = horizon;
    return f;
}

BackgroundFunction BackgroundFunction::spline(SplineBasis basis, Vector coef) {
    if (coef.size() != basis.dimension())
        throw ModelError("background coefficient length mismatch");
    BackgroundFunction f;
    f.kind_ = Kind::Spline;
    f.basis_ = std::move(basis);
    f.coef_ = std::move(coef);
    return f;
}

double BackgroundFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return offset_;
        case Kind::Sinusoid:
            return offset_ + amplitude_ * std::sin(2.0 * M_PI * freq_ * t / horizon_);
        case Kind::Spline: {
            double vals[32];
            const int first = basis_.eval_nonzero(t, vals);
            if (first < 0) return 0.0;
            double v = 0.0;
            for (int i = 0; i < basis_.order(); ++i)
                v += vals[i] * coef_[first + i];
            return v;
        }
    }
    return 0.0;
}

double BackgroundFunction::sup(double t1, double t2) const {
    switch (kind_) {
        case Kind::Constant:
            return offset_;
        case Kind::Sinusoid: {
            double best = std::max((*this)(t1), (*this)(t2));
            // Interior peaks of sin at phase pi/2 + 2 pi n.
            const double period = horizon_ / freq_;
            const double tpeak0 = period / 4.0;
            const long n0 = (long)std::ceil((t1 - tpeak0) / period);
            for (long n = n0; tpeak0 + n * period <= t2; ++n)
                best = std::max(best, offset_ + amplitude_);
            // Troughs matter when amplitude < 0.
            const double ttr0 = 3.0 * period / 4.0;
            const long m0 = (long)std::ceil((t1 - ttr0) / period);
            for (long n = m0; ttr0 + n * period <= t2; ++n)
                best = std::max(best, offset_ - amplitude_);
            return best;
        }
        case Kind::Spline:
            return coef_.size() ? coef_.maxCoeff() : 0.0;
    }
    return 0.0;
}

double BackgroundFunction::sup() const {
    switch (kind_) {
        case Kind::Constant:
            return offset_;
        case Kind::Sinusoid:
            return offset_ + std::abs(amplitude_);
        case Kind::Spline:
            return coef_.size() ? coef_.maxCoeff() : 0.0;
    }
    return 0.0;
}

EdgeSet ModelSpec::edge_set() const {
    EdgeSet e;
    for (const auto& [jk, w] : transfers)
        if (!w.is_zero()) e.insert(jk);
    return e;
}

double ModelSpec::max_support_b() const {
    double b = 0.0;
    for (const auto& [jk, w] : transfers) b = std::max(b, w.support_b());
    return b;
}

Matrix ModelSpec::omega_matrix() const {
    Matrix o = Matrix::Zero(p, p);
    for (const auto& [jk, w] : transfers)
        o(jk.first, jk.second) = w.abs_integral();
    return o;
}

void ModelSpec::validate() const {
    if (p <= 0) throw ModelError("model needs at least one node");
    if ((int)backgrounds.size() != p)
        throw ModelError("one background function per node required");
    if (horizon_T <= 0.0) throw ModelError("horizon must be positive");
    for (const auto& [jk, w] : transfers) {
        (void)w;
        if (jk.first < 0 || jk.first >= p || jk.second < 0 || jk.second >= p)
            throw ModelError("transfer indices out of range");
    }
    const Matrix o = omega_matrix();
    if (o.cwiseAbs().sum() == 0.0) return;
    const double radius =
        Eigen::EigenSolver<Matrix>(o, false).eigenvalues().cwiseAbs().maxCoeff();
    if (!(radius < 1.0))
        throw ModelError("unstable model: spectral radius of |omega| integrals is " +
                         std::to_string(radius));
}

Vector ModelSpec::mean_intensity_bound(double nu_star) const {
    validate();
    const Matrix o = omega_matrix();
    const Matrix a = Matrix::Identity(p, p) - o;
    const Vector rhs = Vector::Constant(p, nu_star);
    Vector lam = a.partialPivLu().solve(rhs);
    if (!lam.allFinite() || (lam.array() < nu_star - 1e-9).any())
        throw ModelError("unstable model: dominating mean intensity not finite");
    return lam;
}

Preset preset_from_name(const std::string& raw) {
    std::string name = raw;
    for (char& c : name)
        if (c == '.') c = '_';
    if (name == "setting1_1") return Preset::Setting1_1;
    if (name == "setting1_2") return Preset::Setting1_2;
    if (name == "setting2") return Preset::Setting2;
    if (name == "setting3_1") return Preset::Setting3_1;
    if (name == "setting3_2") return Preset::Setting3_2;
    throw ModelError("unknown preset: " + name);
}

std::string preset_name(Preset p) {
    switch (p) {
        case Preset::Setting1_1: return "setting1_1";
        case Preset::Setting1_2: return "setting1_2";
        case Preset::Setting2: return "setting2";
        case Preset::Setting3_1: return "setting3_1";
        case Preset::Setting3_2: return "setting3_2";
    }
    return "?";
}

namespace {
constexpr double kSupportB = 0.01;

TransferFunction excitatory_curve() {
    return TransferFunction::gamma_like(20000.0, 0.001, 500.0, kSupportB);
}
TransferFunction inhibitory_curve() {
    return TransferFunction::gamma_like(-15000.0, 0.001, 500.0, kSupportB);
}
}  // namespace

ModelSpec make_preset(Preset which, int p, double T, std::uint64_t seed,
                      const PresetOptions& opts) {
    ModelSpec m;
    m.p = p;
    m.horizon_T = T;
    Rng rng(seed, /*stream=*/0xA1FA);

    auto draw_alpha = [&](double mean, double sd) {
        double a = rng.normal(mean, sd);
        while (a <= 1.0) a = rng.normal(mean, sd);  // keep baselines positive
        return a;
    };

    switch (which) {
        case Preset::Setting1_1:
        case Preset::Setting1_2: {
            if (p < 12) throw ModelError("setting1 presets need p >= 12");
            const double f = opts.freq > 0 ? opts.freq : 1.0;
            m.backgrounds.push_back(BackgroundFunction::sinusoid(60.0, 50.0, f, T));
            for (int j = 1; j < p; ++j) {
                const double a = draw_alpha(30.0, 5.0);
                m.backgrounds.push_back(BackgroundFunction::sinusoid(a, a, f, T));
            }
            // Star network: node 0 drives nodes 1..10; mixed-sign variant
            // makes the last five targets inhibitory.
            for (int j = 1; j <= 10; ++j) {
                const bool inhib =
                    (which == Preset::Setting1_2) && (j >= 6);
                m.transfers[{j, 0}] =
                    inhib ? inhibitory_curve() : excitatory_curve();
            }
            break;
        }
        case Preset::Setting2: {
            if (opts.network.empty())
                throw ModelError("setting2 needs a supplied network");
            const double f = opts.freq > 0 ? opts.freq : 5.0;
            for (int j = 0; j < p; ++j) {
                const double a = draw_alpha(100.0, 5.0);
                m.backgrounds.push_back(BackgroundFunction::sinusoid(a, a, f, T));
            }
            Rng sign_rng(seed, /*stream=*/0x51C7);
            for (const auto& jk : opts.network) {
                const bool inhib = sign_rng.uniform() < 0.5;
                m.transfers[jk] = inhib ? inhibitory_curve() : excitatory_curve();
            }
            break;
        }
        case Preset::Setting3_1:
        case Preset::Setting3_2: {
            if (p < 12) throw ModelError("setting3 presets need p >= 12");
            const double f = opts.freq > 0 ? opts.freq : 1.0;
            for (int j = 0; j < p; ++j) {
                const double a = draw_alpha(50.0, 5.0);
                if (which == Preset::Setting3_1)
                    m.backgrounds.push_back(BackgroundFunction::constant(a));
                else
                    m.backgrounds.push_back(
                        BackgroundFunction::sinusoid(a, opts.rho * a, f, T));
            }
            for (int j = 1; j <= 10; ++j)
                m.transfers[{j, 0}] = (j >= 6) ? inhibitory_curve()
                                               : excitatory_curve();
            break;
        }
    }
    m.validate();
    return m;
}

EdgeSet erdos_renyi_network(int p, double edge_prob, std::uint64_t seed) {
    if (edge_prob < 0.0 || edge_prob > 1.0)
        throw ModelError("edge probability must be in [0, 1]");
    EdgeSet e;
    Rng rng(seed, 0xE2);
    for (int j = 0; j < p; ++j)
        for (int k = 0; k < p; ++k) {
            if (j == k) continue;
            if (rng.uniform() < edge_prob) e.insert({j, k});
        }
    return e;
}

EdgeSet power_law_network(int p, double alpha, std::uint64_t seed) {
    if (alpha <= 0.0) throw ModelError("power-law exponent must be positive");
    if (p < 2) throw ModelError("network needs p >= 2");
    Rng rng(seed, 0xF7);

    // Discrete power law on {1..p-1}: P(d) ~ d^{-(alpha+1)}.
    std::vector<double> cdf(p - 1);
    double z = 0.0;
    for (int d = 1; d <= p - 1; ++d) {
        z += std::pow((double)d, -(alpha + 1.0));
        cdf[d - 1] = z;
    }
    for (auto& c : cdf) c /= z;

    EdgeSet e;
    std::vector<int> targets(p);
    for (int k = 0; k < p; ++k) {
        const double u = rng.uniform();
        const int deg =
            1 + int(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        // Sample `deg` distinct targets j != k by partial Fisher-Yates.
        int n = 0;
        for (int j = 0; j < p; ++j)
            if (j != k) targets[n++] = j;
        for (int i = 0; i < deg && i < n; ++i) {
            const int pick = i + (int)rng.uniform_int(n - i);
            std::swap(targets[i], targets[pick]);
            e.insert({targets[i], k});
        }
    }
    return e;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {
using nlohmann::json;

json transfer_to_json(const TransferFunction& w) {
    json j;
    switch (w.kind()) {
        case TransferFunction::Kind::Zero:
            j["kind"] = "zero";
            break;
        case TransferFunction::Kind::GammaLike:
            j["kind"] = "gamma_like";
            j["scale"] = w.scale_;
            j["shift"] = w.shift_;
            j["rate"] = w.rate_;
            j["support_b"] = w.support_b();
            break;
        case TransferFunction::Kind::Spline:
            j["kind"] = "spline";
            j["order"] = w.basis_.order();
            j["dimension"] = w.basis_.dimension();
            j["support_b"] = w.support_b();
            j["coef"] = std::vector<double>(w.coef_.data(),
                                            w.coef_.data() + w.coef_.size());
            break;
    }
    return j;
}

TransferFunction transfer_from_json(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "zero") return TransferFunction::zero();
    if (kind == "gamma_like")
        return TransferFunction::gamma_like(j.at("scale"), j.at("shift"),
                                            j.at("rate"), j.at("support_b"));
    if (kind == "spline") {
        const std::vector<double> c = j.at("coef");
        Vector coef = Eigen::Map<const Vector>(c.data(), (Eigen::Index)c.size());
        return TransferFunction::spline(
            SplineBasis::make(j.at("order"), j.at("dimension"), 0.0,
                              j.at("support_b")),
            coef);
    }
    throw ModelError("unknown transfer kind: " + kind);
}

json background_to_json(const BackgroundFunction& f) {
    json j;
    switch (f.kind()) {
        case BackgroundFunction::Kind::Constant:
            j["kind"] = "constant";
            j["value"] = f.offset_;
            break;
        case BackgroundFunction::Kind::Sinusoid:
            j["kind"] = "sinusoid";
            j["offset"] = f.offset_;
            j["amplitude"] = f.amplitude_;
            j["freq"] = f.freq_;
            j["horizon"] = f.horizon_;
            break;
        case BackgroundFunction::Kind::Spline:
            j["kind"] = "spline";
            j["order"] = f.basis_.order();
            j["dimension"] = f.basis_.dimension();
            j["a1"] = f.basis_.a1();
            j["a2"] = f.basis_.a2();
            j["coef"] = std::vector<double>(f.coef_.data(),
                                            f.coef_.data() + f.coef_.size());
            break;
    }
    return j;
}

BackgroundFunction background_from_json(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "constant") return BackgroundFunction::constant(j.at("value"));
    if (kind == "sinusoid")
        return BackgroundFunction::sinusoid(j.at("offset"), j.at("amplitude"),
                                            j.at("freq"), j.at("horizon"));
    if (kind == "spline") {
        const std::vector<double> c = j.at("coef");
        Vector coef = Eigen::Map<const Vector>(c.data(), (Eigen::Index)c.size());
        return BackgroundFunction::spline(
            SplineBasis::make(j.at("order"), j.at("dimension"), j.at("a1"),
                              j.at("a2")),
            coef);
    }
    throw ModelError("unknown background kind: " + kind);
}
}  // namespace

std::string ModelSpec::to_json() const {
    json j;
    j["p"] = p;
    j["horizon_T"] = horizon_T;
    j["link"] = link;
    j["backgrounds"] = json::array();
    for (const auto& f : backgrounds) j["backgrounds"].push_back(background_to_json(f));
    j["transfers"] = json::array();
    for (const auto& [jk, w] : transfers) {
        json e = transfer_to_json(w);
        e["target"] = jk.first;
        e["source"] = jk.second;
        j["transfers"].push_back(e);
    }
    return j.dump(2);
}

ModelSpec ModelSpec::from_json(const std::string& text) {
    const json j = json::parse(text);
    ModelSpec m;
    m.p = j.at("p");
    m.horizon_T = j.at("horizon_T");
    m.link = j.value("link", "relu");
    for (const auto& f : j.at("backgrounds"))
        m.backgrounds.push_back(background_from_json(f));
    for (const auto& e : j.at("transfers"))
        m.transfers[{e.at("target"), e.at("source")}] = transfer_from_json(e);
    m.validate();
    return m;
}

}  // namespace hawkesnet

#include "hawkesnet/design.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

namespace hawkesnet {

namespace {

// Quadrature partition: uniform cells of width dt refined by splitting at
// every integrand breakpoint (event times shifted by the transfer-basis
// knots, plus the background-basis knots). Within each sub-cell the
// integrand is a smooth polynomial of degree at most 2(order-1), so an
// n-point Gauss-Legendre rule with 2n-1 >= 2(order-1) integrates it exactly
// up to roundoff; the dt-halving drift is then pure floating-point noise.
struct QuadGrid {
    std::vector<double> mid;     // quadrature nodes, ascending
    std::vector<double> weight;
};

QuadGrid make_grid(const EventData& events, const SplineBasis& basis0,
                   const SplineBasis& basis1, double dt) {
    const double T = events.horizon_T;
    std::vector<double> cuts;
    cuts.reserve(events.total_events() * basis1.breakpoints().size() + 64);
    for (const auto& ev : events.times)
        for (double u : ev)
            for (double off : basis1.breakpoints()) {
                const double c = u + off;
                if (c > 0.0 && c < T) cuts.push_back(c);
            }
    for (double c : basis0.breakpoints())
        if (c > 0.0 && c < T) cuts.push_back(c);

    const auto n_cells = (std::size_t)std::ceil(T / dt - 1e-12);
    for (std::size_t i = 1; i < n_cells; ++i) cuts.push_back(i * dt);
    cuts.push_back(0.0);
    cuts.push_back(T);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Gauss-Legendre nodes/weights on [-1, 1]; n chosen for exactness of the
    // product of two basis polynomials (degree 2(order-1) <= 6 at order 4).
    const int n_gl = std::clamp(std::max(basis0.order(), basis1.order()), 2, 5);
    static const double kNodes[6][6] = {
        {},
        {},
        {-0.5773502691896257, 0.5773502691896257},
        {-0.7745966692414834, 0.0, 0.7745966692414834},
        {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
         0.8611363115940526},
        {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
         0.9061798459386640}};
    static const double kWeights[6][6] = {
        {},
        {},
        {1.0, 1.0},
        {0.5555555555555556, 0.8888888888888888, 0.5555555555555556},
        {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
         0.3478548451374538},
        {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
         0.4786286704993665, 0.2369268850561891}};

    QuadGrid g;
    g.mid.reserve(cuts.size() * n_gl);
    g.weight.reserve(cuts.size() * n_gl);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double w = cuts[i + 1] - cuts[i];
        if (w <= 0.0) continue;
        const double c = 0.5 * (cuts[i] + cuts[i + 1]);
        for (int q = 0; q < n_gl; ++q) {
            g.mid.push_back(c + 0.5 * w * kNodes[n_gl][q]);
            g.weight.push_back(0.5 * w * kWeights[n_gl][q]);
        }
    }
    return g;
}

// Fills the Psi_k blocks of `psi` (groups 1..p) at time t; group 0 is the
// caller's responsibility. Uses per-node cursors valid for nondecreasing t.
class FeatureScanner {
public:
    FeatureScanner(const EventData& events, const SplineBasis& basis1, int m0)
        : events_(events), basis1_(basis1), m0_(m0),
          lo_(events.p, 0), b_(basis1.a2()) {}

    void seek(double t) {
        for (int k = 0; k < events_.p; ++k) {
            const auto& ev = events_.times[k];
            lo_[k] = std::lower_bound(ev.begin(), ev.end(), t - b_) - ev.begin();
        }
    }

    void fill(double t, Vector& psi) const {
        const int m1 = basis1_.dimension();
        double vals[32];
        for (int k = 0; k < events_.p; ++k) {
            const auto& ev = events_.times[k];
            auto i = lo_[k];
            while (i < ev.size() && ev[i] <= t - b_) ++i;
            lo_[k] = i;
            double* block = psi.data() + m0_ + (std::size_t)k * m1;
            for (; i < ev.size() && ev[i] < t; ++i) {
                const int first = basis1_.eval_nonzero(t - ev[i], vals);
                if (first < 0) continue;
                for (int q = 0; q < basis1_.order(); ++q)
                    block[first + q] += vals[q];
            }
        }
    }

private:
    const EventData& events_;
    const SplineBasis& basis1_;
    int m0_;
    mutable std::vector<std::size_t> lo_;
    double b_;
};

}  // namespace

Vector compute_features(const EventData& events, const SplineBasis& basis1,
                        double t) {
    const int m1 = basis1.dimension();
    Vector psi = Vector::Zero((std::size_t)events.p * m1);
    const double b = basis1.a2();
    double vals[32];
    for (int k = 0; k < events.p; ++k) {
        const auto& ev = events.times[k];
        auto it = std::lower_bound(ev.begin(), ev.end(), t - b);
        for (; it != ev.end() && *it < t; ++it) {
            const int first = basis1.eval_nonzero(t - *it, vals);
            if (first < 0) continue;
            for (int q = 0; q < basis1.order(); ++q)
                psi[(std::size_t)k * m1 + first + q] += vals[q];
        }
    }
    return psi;
}

double DesignCache::loss(int j, const Vector& beta) const {
    return -2.0 * beta.dot(alpha[j]) + beta.dot(G.selfadjointView<Eigen::Upper>() * beta);
}

DesignCache build_design(const EventData& events, const SplineBasis& basis0,
                         const SplineBasis& basis1, const DesignOptions& opts) {
    events.check();
    const int p = events.p;
    const double T = events.horizon_T;
    const double b = basis1.a2();
    if (std::abs(basis0.a2() - T) > 1e-12 * std::max(1.0, T))
        throw DesignError("background basis must live on [0, T]");

    const int m0 = basis0.dimension(), m1 = basis1.dimension();
    const int dim = m0 + p * m1;

    double dt = opts.grid_dt;
    if (dt <= 0.0) dt = std::min(b / (4.0 * m1), T / 5000.0);
    const double span1 = b / (basis1.dimension() - basis1.order() + 1);
    const double span0 = T / (basis0.dimension() - basis0.order() + 1);
    if (dt > std::min(span0, span1) / 4.0 + 1e-15)
        throw DesignError("grid_dt too coarse for the requested bases");

    DesignCache d;
    d.basis0 = basis0;
    d.basis1 = basis1;
    d.p = p;
    d.horizon_T = T;
    d.grid_dt = dt;
    d.dim = dim;
    d.event_counts.resize(p);
    for (int k = 0; k < p; ++k) d.event_counts[k] = events.times[k].size();

    const QuadGrid grid = make_grid(events, basis0, basis1, dt);
    const std::size_t n = grid.mid.size();

    // Fixed chunking (independent of thread count) keeps the reduction tree,
    // and hence the bitwise result, stable.
    const std::size_t n_chunks = 64;
    std::vector<Matrix> partial_g(n_chunks);
    std::vector<Vector> partial_mean(n_chunks);

    std::atomic<std::size_t> next_chunk{0};
    auto worker = [&]() {
        constexpr std::size_t kBlock = 128;
        Matrix block(dim, kBlock);
        Vector psi(dim);
        double vals0[32];
        for (;;) {
            const std::size_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            const std::size_t begin = n * c / n_chunks;
            const std::size_t end = n * (c + 1) / n_chunks;
            Matrix g = Matrix::Zero(dim, dim);
            Vector mean = Vector::Zero(dim);
            FeatureScanner scan(events, basis1, m0);
            if (begin < end) scan.seek(grid.mid[begin]);
            std::size_t i = begin;
            while (i < end) {
                const std::size_t bs = std::min(kBlock, end - i);
                for (std::size_t q = 0; q < bs; ++q) {
                    const double t = grid.mid[i + q];
                    const double w = grid.weight[i + q];
                    psi.setZero();
                    const int first = basis0.eval_nonzero(t, vals0);
                    if (first >= 0) {
                        double sum = 0.0;
                        for (int r = 0; r < basis0.order(); ++r) {
                            psi[first + r] = vals0[r];
                            sum += vals0[r];
                        }
                        if (basis0.first_element_constant()) psi[0] = sum;
                    }
                    scan.fill(t, psi);
                    mean += w * psi;
                    block.col(q) = std::sqrt(w) * psi;
                }
                g.selfadjointView<Eigen::Upper>().rankUpdate(
                    block.leftCols(bs), 1.0);
                i += bs;
            }
            partial_g[c] = std::move(g);
            partial_mean[c] = std::move(mean);
        }
    };

    const int n_threads = std::max(1, opts.n_threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    d.G = Matrix::Zero(dim, dim);
    d.psi_mean = Vector::Zero(dim);
    for (std::size_t c = 0; c < n_chunks; ++c) {
        if (partial_g[c].size()) d.G += partial_g[c];
        if (partial_mean[c].size()) d.psi_mean += partial_mean[c];
    }
    d.G /= T;
    d.psi_mean /= T;
    d.G = d.G.selfadjointView<Eigen::Upper>();

    if (opts.exact_background_block)
        d.G.topLeftCorner(m0, m0) = basis0.gram() / T;

    // Targets: exact Stieltjes sums over node-j events, no quadrature.
    d.alpha.assign(p, Vector::Zero(dim));
    double vals0[32];
    for (int j = 0; j < p; ++j) {
        Vector psi(dim);
        FeatureScanner scan(events, basis1, m0);
        if (!events.times[j].empty()) scan.seek(events.times[j].front());
        for (double t : events.times[j]) {
            psi.setZero();
            const int first = basis0.eval_nonzero(t, vals0);
            if (first >= 0) {
                double sum = 0.0;
                for (int r = 0; r < basis0.order(); ++r) {
                    psi[first + r] = vals0[r];
                    sum += vals0[r];
                }
                if (basis0.first_element_constant()) psi[0] = sum;
            }
            scan.fill(t, psi);
            d.alpha[j] += psi;
        }
        d.alpha[j] /= T;
    }
    return d;
}

DesignCache build_design(const EventData& events, int order0, int m0,
                         int order1, int m1, double support_b,
                         const DesignOptions& opts) {
    return build_design(events,
                        SplineBasis::make(order0, m0, 0.0, events.horizon_T),
                        SplineBasis::make(order1, m1, 0.0, support_b), opts);
}

// ---------------------------------------------------------------------------
// Binary dump

namespace {
constexpr char kMagic[8] = {'H', 'N', 'D', 'C', '0', '0', '0', '1'};

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw DesignError("truncated design dump");
    return v;
}
void put_vec(std::ostream& out, const Vector& v) {
    put<std::int64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()),
              (std::streamsize)(v.size() * sizeof(double)));
}
Vector get_vec(std::istream& in) {
    const auto n = get<std::int64_t>(in);
    Vector v(n);
    in.read(reinterpret_cast<char*>(v.data()), (std::streamsize)(n * sizeof(double)));
    if (!in) throw DesignError("truncated design dump");
    return v;
}
}  // namespace

void DesignCache::save(std::ostream& out) const {
    out.write(kMagic, sizeof kMagic);
    put<std::int32_t>(out, p);
    put(out, horizon_T);
    put(out, grid_dt);
    put<std::int32_t>(out, basis0.order());
    put<std::int32_t>(out, basis0.dimension());
    put<std::int32_t>(out, basis0.first_element_constant() ? 1 : 0);
    put<std::int32_t>(out, basis1.order());
    put<std::int32_t>(out, basis1.dimension());
    put(out, basis1.a2());
    put<std::int64_t>(out, (std::int64_t)G.rows());
    out.write(reinterpret_cast<const char*>(G.data()),
              (std::streamsize)(G.size() * sizeof(double)));
    for (const auto& a : alpha) put_vec(out, a);
    put_vec(out, psi_mean);
    for (auto c : event_counts) put<std::int64_t>(out, (std::int64_t)c);
}

DesignCache DesignCache::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw DesignError("bad design dump header");
    DesignCache d;
    d.p = get<std::int32_t>(in);
    d.horizon_T = get<double>(in);
    d.grid_dt = get<double>(in);
    const int o0 = get<std::int32_t>(in);
    const int m0 = get<std::int32_t>(in);
    const int cf = get<std::int32_t>(in);
    const int o1 = get<std::int32_t>(in);
    const int m1 = get<std::int32_t>(in);
    const double b = get<double>(in);
    d.basis0 = cf ? SplineBasis::make_constant_first(o0, m0, 0.0, d.horizon_T)
                  : SplineBasis::make(o0, m0, 0.0, d.horizon_T);
    d.basis1 = SplineBasis::make(o1, m1, 0.0, b);
    const auto n = get<std::int64_t>(in);
    d.dim = (int)n;
    d.G.resize(n, n);
    in.read(reinterpret_cast<char*>(d.G.data()), (std::streamsize)(n * n * sizeof(double)));
    if (!in) throw DesignError("truncated design dump");
    d.alpha.resize(d.p);
    for (auto& a : d.alpha) a = get_vec(in);
    d.psi_mean = get_vec(in);
    d.event_counts.resize(d.p);
    for (auto& c : d.event_counts) c = (std::size_t)get<std::int64_t>(in);
    return d;
}

}  // namespace hawkesnet

#include "hawkesnet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "hawkesnet/rng.hpp"

namespace hawkesnet {

namespace {

struct EdgeView {
    int target;
    const TransferFunction* w;
};

// Per-source outgoing edge lists; lets the intensity loop touch each recent
// event once.
std::vector<std::vector<EdgeView>> outgoing(const ModelSpec& m) {
    std::vector<std::vector<EdgeView>> out(m.p);
    for (const auto& [jk, w] : m.transfers)
        if (!w.is_zero()) out[jk.second].push_back({jk.first, &w});
    return out;
}

std::string hash_model(const ModelSpec& m) {
    // FNV-1a over the JSON form; identifies the generating model in outputs.
    const std::string s = m.to_json();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

}  // namespace

double model_psi(const ModelSpec& model, int j,
                 const std::vector<std::vector<double>>& history, double t) {
    double psi = model.backgrounds[j](t);
    for (const auto& [jk, w] : model.transfers) {
        if (jk.first != j || w.is_zero()) continue;
        const auto& ev = history[jk.second];
        const double b = w.support_b();
        auto lo = std::lower_bound(ev.begin(), ev.end(), t - b);
        for (auto it = lo; it != ev.end() && *it < t; ++it) psi += w(t - *it);
    }
    return psi;
}

EventData simulate(const ModelSpec& model, std::uint64_t seed) {
    model.validate();
    const int p = model.p;
    const double T = model.horizon_T;
    const double b_max = model.max_support_b();

    const auto out_edges = outgoing(model);
    // Sum over targets of sup of positive part, per source node.
    std::vector<double> possup_out(p, 0.0);
    for (int k = 0; k < p; ++k)
        for (const auto& e : out_edges[k]) possup_out[k] += e.w->positive_sup();

    EventData data;
    data.p = p;
    data.horizon_T = T;
    data.times.resize(p);
    data.seed = seed;
    data.model_hash = hash_model(model);

    Rng rng(seed, /*stream=*/0x9409);  // proposal stream

    // Sliding window of events still inside the widest kernel support:
    // (events[k][lo[k]] .. end) are the events in (t - b_max, t].
    std::vector<std::size_t> lo(p, 0);

    std::vector<double> psi(p), contrib(p);

    auto recent_count = [&](int k) { return data.times[k].size() - lo[k]; };

    auto dominating_rate = [&](double t, double delta) {
        double m = 0.0;
        for (int j = 0; j < p; ++j)
            m += std::max(0.0, model.backgrounds[j].sup(t, std::min(t + delta, T)));
        for (int k = 0; k < p; ++k)
            if (!out_edges[k].empty())
                m += double(recent_count(k)) * possup_out[k];
        return m;
    };

    auto intensities_at = [&](double t) {
        for (int j = 0; j < p; ++j) contrib[j] = 0.0;
        for (int k = 0; k < p; ++k) {
            if (out_edges[k].empty()) continue;
            const auto& ev = data.times[k];
            for (std::size_t i = lo[k]; i < ev.size(); ++i) {
                const double lag = t - ev[i];
                if (lag <= 0.0) continue;
                for (const auto& e : out_edges[k])
                    contrib[e.target] += (*e.w)(lag);
            }
        }
        double total = 0.0;
        for (int j = 0; j < p; ++j) {
            psi[j] = std::max(0.0, model.backgrounds[j](t) + contrib[j]);
            total += psi[j];
        }
        return total;
    };

    double t = 0.0;
    const std::size_t max_events = 100'000'000;
    std::size_t proposals = 0;
    const std::size_t max_proposals = 2'000'000'000;

    while (t < T) {
        // Age out events past the kernel support.
        for (int k = 0; k < p; ++k) {
            const auto& ev = data.times[k];
            while (lo[k] < ev.size() && ev[lo[k]] <= t - b_max) ++lo[k];
        }

        double delta = b_max > 0.0 ? b_max : T / 1024.0;
        double m = dominating_rate(t, delta);
        if (m <= 0.0) {
            t += delta;
            continue;
        }
        if (delta < 1.0 / m) {
            delta = 1.0 / m;
            m = dominating_rate(t, delta);
        }
        if (!(m < 1e15))
            throw SimulationError("dominating rate overflow: M=" + std::to_string(m) +
                                  " at t=" + std::to_string(t));

        const double wait = rng.exponential(m);
        if (++proposals > max_proposals)
            throw SimulationError("proposal budget exhausted; model likely unstable");
        if (wait > delta) {
            t += delta;
            continue;
        }
        t += wait;
        if (t > T) break;

        const double total = intensities_at(t);
        if (total > m * (1.0 + 1e-8))
            throw SimulationError("dominating bound violated (internal error)");
        const double u = rng.uniform() * m;
        if (u >= total) continue;  // rejected proposal

        // Attribute to a node proportionally to its intensity.
        double acc = 0.0;
        int j = p - 1;
        for (int jj = 0; jj < p; ++jj) {
            acc += psi[jj];
            if (u < acc) {
                j = jj;
                break;
            }
        }
        data.times[j].push_back(t);
        if (data.total_events() > max_events)
            throw SimulationError("event budget exhausted; model likely unstable");
    }
    return data;
}

namespace {

// Lazily realized unit-rate planar Poisson field on [0,T] x [0,inf),
// extended upward in strips. Points persist across thinning rounds.
struct PoissonField {
    std::vector<std::pair<double, double>> pts;  // (t, y), sorted by t
    double height = 0.0;

    void ensure(double h, double T, Rng& rng) {
        if (h <= height) return;
        const double area = (h - height) * T;
        const std::uint64_t n = rng.poisson(area);
        for (std::uint64_t i = 0; i < n; ++i)
            pts.push_back({rng.uniform(0.0, T), rng.uniform(height, h)});
        std::sort(pts.begin(), pts.end());
        height = h;
    }
};

// Max count of `ev` in any half-open window of length b.
std::size_t max_window_count(const std::vector<double>& ev, double b) {
    std::size_t best = 0, lo = 0;
    for (std::size_t hi = 0; hi < ev.size(); ++hi) {
        while (ev[hi] - ev[lo] > b) ++lo;
        best = std::max(best, hi - lo + 1);
    }
    return best;
}

}  // namespace

EventData simulate_iterative(const ModelSpec& model, int n_iters,
                             std::uint64_t seed) {
    if (n_iters < 1) throw SimulationError("n_iters must be >= 1");
    model.validate();
    const int p = model.p;
    const double T = model.horizon_T;
    const double b_max = model.max_support_b();

    std::vector<PoissonField> fields(p);
    std::vector<Rng> field_rngs;
    field_rngs.reserve(p);
    for (int j = 0; j < p; ++j) field_rngs.emplace_back(seed, 0xF1E1D000ULL + j);

    std::vector<double> possup_in(p, 0.0);
    std::vector<std::vector<std::pair<int, const TransferFunction*>>> in_edges(p);
    for (const auto& [jk, w] : model.transfers)
        if (!w.is_zero()) in_edges[jk.first].push_back({jk.second, &w});

    std::vector<std::vector<double>> events(p);  // round n
    for (int n = 1; n <= n_iters; ++n) {
        std::vector<std::vector<double>> next(p);
        for (int j = 0; j < p; ++j) {
            // Height needed this round: background sup plus the worst-case
            // kernel pile-up from the previous round's events.
            double h = std::max(0.0, model.backgrounds[j].sup(0.0, T));
            for (const auto& [k, w] : in_edges[j])
                h += double(max_window_count(events[k], w->support_b())) *
                     w->positive_sup();
            fields[j].ensure(h * (1.0 + 1e-12) + 1e-12, T, field_rngs[j]);

            for (const auto& [tt, yy] : fields[j].pts) {
                const double lam =
                    std::max(0.0, model_psi(model, j, events, tt));
                if (yy < lam) next[j].push_back(tt);
            }
            std::sort(next[j].begin(), next[j].end());
        }
        events = std::move(next);
    }
    (void)b_max;

    EventData data;
    data.p = p;
    data.horizon_T = T;
    data.seed = seed;
    data.model_hash = hash_model(model);
    data.times.resize(p);
    for (int j = 0; j < p; ++j)
        for (double t : events[j])
            if (t > 0.0 && t <= T) data.times[j].push_back(t);
    return data;
}

}  // namespace hawkesnet

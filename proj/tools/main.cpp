// hawkesnet command-line pipeline: simulate / fit / test / replicate.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "hawkesnet/inference.hpp"
#include "hawkesnet/metrics.hpp"
#include "hawkesnet/selection.hpp"
#include "hawkesnet/simulate.hpp"

namespace hn = hawkesnet;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitNonConverged = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() &&
           s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

// ----- shared option bundles -------------------------------------------------

struct ModelArgs {
    std::string preset = "setting1.1";
    std::string model_file;
    int p = 100;
    double T = 10.0;
    double rho = 1.0;
    double freq = -1.0;
    std::string network = "none";  // none | er | powerlaw
    double edge_prob = 0.025;
    double power_alpha = 1.5;
    std::uint64_t network_seed = 1;

    void attach(CLI::App* app) {
        app->add_option("--preset", preset,
                        "Generative preset: setting1.1, setting1.2, setting2, "
                        "setting3.1, setting3.2")
            ->capture_default_str();
        app->add_option("--model", model_file,
                        "ModelSpec JSON file (overrides --preset)");
        app->add_option("-p,--nodes", p, "Number of nodes")
            ->capture_default_str();
        app->add_option("-T,--horizon", T, "Observation horizon")
            ->capture_default_str();
        app->add_option("--rho", rho, "Setting 3.2 departure from constant")
            ->capture_default_str();
        app->add_option("--freq", freq,
                        "Sinusoid frequency (default 1; 5 for setting2)");
        app->add_option("--network", network,
                        "Random network for setting2: er or powerlaw")
            ->capture_default_str();
        app->add_option("--edge-prob", edge_prob, "Erdos-Renyi edge probability")
            ->capture_default_str();
        app->add_option("--power-alpha", power_alpha, "Power-law tail exponent")
            ->capture_default_str();
        app->add_option("--network-seed", network_seed, "Network draw seed")
            ->capture_default_str();
    }

    hn::ModelSpec build(std::uint64_t model_seed) const {
        if (!model_file.empty())
            return hn::ModelSpec::from_json(read_file(model_file));
        hn::PresetOptions po;
        po.rho = rho;
        po.freq = freq;
        if (network == "er")
            po.network = hn::erdos_renyi_network(p, edge_prob, network_seed);
        else if (network == "powerlaw")
            po.network = hn::power_law_network(p, power_alpha, network_seed);
        else if (network != "none")
            throw ConfigError("unknown --network " + network);
        return hn::make_preset(hn::preset_from_name(preset), p, T, model_seed,
                               po);
    }

    json to_json() const {
        return json{{"preset", preset},        {"model", model_file},
                    {"p", p},                  {"T", T},
                    {"rho", rho},              {"freq", freq},
                    {"network", network},      {"edge_prob", edge_prob},
                    {"power_alpha", power_alpha},
                    {"network_seed", network_seed}};
    }
};

struct FitArgs {
    int m0 = 4, m1 = 3;
    std::vector<int> m0_candidates, m1_candidates;
    int order0 = 4, order1 = 4;
    double support_b = 0.01;
    double grid_dt = 0.0;
    int eta_grid = 50;
    double alpha_t = -1.0;
    double eta_min_ratio = 1e-2;
    double s0_scale = 10.0;
    int threads = 0;
    bool keep_shrunk = false;
    bool gic_penalized_loss = false;

    void attach(CLI::App* app) {
        app->add_option("--m0", m0, "Background basis dimension")
            ->capture_default_str();
        app->add_option("--m1", m1, "Transfer basis dimension")
            ->capture_default_str();
        app->add_option("--m0-candidates", m0_candidates,
                        "Candidate m0 list; with --m1-candidates triggers "
                        "BIC basis selection");
        app->add_option("--m1-candidates", m1_candidates, "Candidate m1 list");
        app->add_option("--order0", order0, "Background spline order")
            ->capture_default_str();
        app->add_option("--order1", order1, "Transfer spline order")
            ->capture_default_str();
        app->add_option("-b,--support-b", support_b, "Transfer support bound")
            ->capture_default_str();
        app->add_option("--grid-dt", grid_dt,
                        "Quadrature cell width (0 = automatic)")
            ->capture_default_str();
        app->add_option("--eta-grid", eta_grid, "Penalty grid size")
            ->capture_default_str();
        app->add_option("--alpha-t", alpha_t,
                        "Tuning-selection penalty weight (<0 = default "
                        "(log p)^2 log(T) * m1/4)")
            ->capture_default_str();
        app->add_option("--eta-min-ratio", eta_min_ratio,
                        "eta_min / eta_max on the geometric grid")
            ->capture_default_str();
        app->add_option("--s0-scale", s0_scale,
                        "Scale of the model-size cap ceil(s sqrt(T)/loglogT)")
            ->capture_default_str();
        app->add_option("--threads", threads,
                        "Worker threads for design assembly (0 = hardware)")
            ->capture_default_str();
        app->add_flag("--keep-shrunk", keep_shrunk,
                      "Report the penalized coefficients instead of the "
                      "unpenalized refit on the selected support");
        app->add_flag("--gic-penalized-loss", gic_penalized_loss,
                      "Score the tuning path by the penalized loss rather "
                      "than the per-support refit loss");
    }

    hn::DesignOptions design_options() const {
        hn::DesignOptions d;
        d.grid_dt = grid_dt;
        d.n_threads = threads > 0
                          ? threads
                          : (int)std::max(1u, std::thread::hardware_concurrency());
        return d;
    }

    hn::SelectOptions select_options() const {
        hn::SelectOptions s;
        s.n_grid = eta_grid;
        s.alpha_T = alpha_t;
        s.eta_min_ratio = eta_min_ratio;
        s.s0_scale = s0_scale;
        s.gic_on_refit = !gic_penalized_loss;
        return s;
    }

    json to_json() const {
        return json{{"m0", m0},
                    {"m1", m1},
                    {"m0_candidates", m0_candidates},
                    {"m1_candidates", m1_candidates},
                    {"order0", order0},
                    {"order1", order1},
                    {"support_b", support_b},
                    {"grid_dt", grid_dt},
                    {"eta_grid", eta_grid},
                    {"alpha_t", alpha_t},
                    {"eta_min_ratio", eta_min_ratio},
                    {"s0_scale", s0_scale},
                    {"threads", threads}};
    }
};

hn::EventData load_events(const std::string& path, int p, double T) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    if (ends_with(path, ".jsonl")) return hn::EventData::read_jsonl(in, p, T);
    return hn::EventData::read_csv(in, p, T);
}

// Fit every node by the GIC-tuned group-lasso path; unless `keep_shrunk`,
// the reported coefficients are the unpenalized refit on the selected
// support (the shrunk path fit decides the support only). Returns per-node
// fits and whether all converged.
std::pair<std::vector<hn::NodeFit>, bool> fit_all_nodes(
    const hn::BlockFactors& factors, const hn::SelectOptions& sopts,
    bool keep_shrunk = false) {
    const hn::DesignCache& d = factors.design();
    std::vector<hn::NodeFit> fits;
    bool all_converged = true;
    for (int j = 0; j < d.p; ++j) {
        if (d.event_counts[j] == 0) {
            hn::NodeFit empty;
            empty.node_j = j;
            empty.beta = hn::Vector::Zero(d.dim);
            empty.converged = true;
            fits.push_back(std::move(empty));
            continue;
        }
        hn::SelectResult r = hn::select_eta(factors, j, sopts);
        all_converged = all_converged && r.best.converged;
        if (!keep_shrunk) {
            hn::NodeFit polished = hn::refit(factors, j, r.best.active_set);
            polished.eta = r.best.eta;
            polished.iterations = r.best.iterations;
            polished.converged = r.best.converged;
            fits.push_back(std::move(polished));
        } else {
            fits.push_back(std::move(r.best));
        }
    }
    return {std::move(fits), all_converged};
}

// ----- subcommands -----------------------------------------------------------

int cmd_simulate(const ModelArgs& margs, std::uint64_t seed, int iterative,
                 const std::string& out_path, const std::string& model_out) {
    hn::ModelSpec model = margs.build(seed);
    hn::EventData ev = iterative > 0 ? hn::simulate_iterative(model, iterative, seed)
                                     : hn::simulate(model, seed);
    json cfg = margs.to_json();
    cfg["seed"] = seed;
    cfg["iterative"] = iterative;

    std::ostringstream body;
    ev.write_csv(body);
    std::ostringstream full;
    full << "# config: " << cfg.dump() << "\n";
    full << "# model_hash: " << ev.model_hash << "\n";
    full << "# content_hash: " << hash_hex(fnv1a(body.str())) << "\n";
    full << body.str();
    if (out_path.empty())
        std::cout << full.str();
    else
        write_file(out_path, full.str());
    if (!model_out.empty()) write_file(model_out, model.to_json());
    std::cerr << "simulated " << ev.total_events() << " events on " << ev.p
              << " nodes over [0, " << ev.horizon_T << "]\n";
    return 0;
}

int cmd_fit(const std::string& events_path, int p, double T,
            const FitArgs& fargs, const std::string& out_path,
            const std::string& gic_out) {
    const std::string raw = read_file(events_path);
    hn::EventData ev = load_events(events_path, p, T);

    int m0 = fargs.m0, m1 = fargs.m1;
    json selection_info;
    if (!fargs.m0_candidates.empty() || !fargs.m1_candidates.empty()) {
        if (fargs.m0_candidates.empty() || fargs.m1_candidates.empty())
            throw ConfigError("--m0-candidates and --m1-candidates go together");
        hn::BasisSelectOptions bopts;
        bopts.order0 = fargs.order0;
        bopts.order1 = fargs.order1;
        bopts.design = fargs.design_options();
        bopts.select = fargs.select_options();
        hn::BasisSelection sel = hn::select_basis_dims(
            ev, fargs.m0_candidates, fargs.m1_candidates, fargs.support_b, bopts);
        m0 = sel.m0;
        m1 = sel.m1;
        selection_info["m0"] = m0;
        selection_info["m1"] = m1;
        json surf = json::array();
        for (const auto& row : sel.surface)
            surf.push_back(json{{"m0", (int)row[0]},
                                {"m1", (int)row[1]},
                                {"bic", row[2]}});
        selection_info["bic_surface"] = std::move(surf);
        std::cerr << "basis selection: m0=" << m0 << " m1=" << m1 << "\n";
    }

    hn::DesignCache design = hn::build_design(
        ev, fargs.order0, m0, fargs.order1, m1, fargs.support_b,
        fargs.design_options());
    hn::BlockFactors factors(design);
    auto [fits, all_converged] = fit_all_nodes(factors, fargs.select_options(), fargs.keep_shrunk);

    std::vector<hn::GicRecord> gic_rows;
    if (!gic_out.empty()) {
        for (int j = 0; j < design.p; ++j) {
            if (design.event_counts[j] == 0) continue;
            hn::SelectResult r = hn::select_eta(factors, j, fargs.select_options());
            gic_rows.insert(gic_rows.end(), r.records.begin(), r.records.end());
        }
    }

    hn::FittedModel fitted = hn::assemble_fitted(design, std::move(fits));
    json out = json::parse(fitted.to_json());
    json cfg = fargs.to_json();
    cfg["events"] = events_path;
    cfg["p"] = p;
    cfg["T"] = T;
    out["config"] = std::move(cfg);
    out["input_hash"] = hash_hex(fnv1a(raw));
    if (!selection_info.empty()) out["basis_selection"] = std::move(selection_info);
    const std::string text = out.dump(2);
    if (out_path.empty())
        std::cout << text << "\n";
    else
        write_file(out_path, text);

    if (!gic_out.empty()) {
        std::ostringstream csv;
        csv << "eta,gic,loss,model_size\n";
        for (const auto& r : gic_rows)
            csv << r.eta << ',' << r.gic_value << ',' << r.loss << ','
                << r.model_size << "\n";
        write_file(gic_out, csv.str());
    }
    std::cerr << "fitted " << fitted.edge_set().size() << " edges\n";
    return all_converged ? 0 : kExitNonConverged;
}

int cmd_test(const std::string& events_path, int p, double T,
             const FitArgs& fargs, double alpha_level, int node,
             const std::string& out_path) {
    const std::string raw = read_file(events_path);
    hn::EventData ev = load_events(events_path, p, T);

    hn::TestOptions topts;
    topts.order0 = fargs.order0;
    topts.order1 = fargs.order1;
    topts.design = fargs.design_options();
    topts.select = fargs.select_options();
    hn::BackgroundTestContext ctx(ev, fargs.m0, fargs.m1, fargs.support_b,
                                  topts);

    json cfg = fargs.to_json();
    cfg["events"] = events_path;
    cfg["alpha_level"] = alpha_level;
    cfg["node"] = node;

    std::ostringstream csv;
    csv << "# config: " << cfg.dump() << "\n";
    csv << "# input_hash: " << hash_hex(fnv1a(raw)) << "\n";
    csv << "node,s_stat,lambda_bar,dof,statistic,p_value,reject\n";
    auto emit = [&](int j) {
        const hn::BackgroundTest t = ctx.test_node(j);
        csv << j << ',' << t.s_stat << ',' << t.lambda_bar << ',' << t.dof
            << ',' << t.statistic << ',' << t.p_value << ','
            << (t.p_value < alpha_level ? 1 : 0) << "\n";
    };
    if (node >= 0) {
        emit(node);
    } else {
        for (int j = 0; j < ev.p; ++j)
            if (!ev.times[j].empty()) emit(j);
    }
    if (out_path.empty())
        std::cout << csv.str();
    else
        write_file(out_path, csv.str());
    return 0;
}

int cmd_replicate(const ModelArgs& margs, const FitArgs& fargs,
                  std::uint64_t seed, int reps, bool with_test,
                  double alpha_level, const std::string& out_path) {
    std::ostringstream csv;
    json cfg = margs.to_json();
    json fcfg = fargs.to_json();
    cfg["fit"] = fcfg;
    cfg["seed"] = seed;
    cfg["reps"] = reps;
    cfg["with_test"] = with_test;
    csv << "# config: " << cfg.dump() << "\n";
    csv << "rep,events,f1,fnr,fpr,mse_background,mse_transfer";
    if (with_test) csv << ",rejection_rate";
    csv << "\n";

    std::vector<double> f1s, fnrs, fprs, mses_bg, mses_tr, rejs;
    bool all_converged = true;
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t model_seed = seed + 7919ull * r;
        const std::uint64_t sim_seed = seed + 104729ull * r + 1;
        hn::ModelSpec model = margs.build(model_seed);
        hn::EventData ev = hn::simulate(model, sim_seed);

        hn::DesignCache design = hn::build_design(
            ev, fargs.order0, fargs.m0, fargs.order1, fargs.m1,
            fargs.support_b, fargs.design_options());
        hn::BlockFactors factors(design);
        auto [fits, converged] = fit_all_nodes(factors, fargs.select_options(), fargs.keep_shrunk);
        all_converged = all_converged && converged;
        hn::FittedModel fitted = hn::assemble_fitted(design, std::move(fits));

        const hn::EdgeScores sc =
            hn::edge_scores(fitted.edge_set(), model.edge_set(), model.p);
        const double mse_bg = hn::mse_background(fitted, model);
        const double mse_tr = hn::mse_transfer(fitted, model);
        f1s.push_back(sc.f1);
        fnrs.push_back(sc.fnr);
        fprs.push_back(sc.fpr);
        mses_bg.push_back(mse_bg);
        mses_tr.push_back(mse_tr);

        double rej = 0.0;
        if (with_test) {
            hn::TestOptions topts;
            topts.order0 = fargs.order0;
            topts.order1 = fargs.order1;
            topts.design = fargs.design_options();
            topts.select = fargs.select_options();
            hn::BackgroundTestContext ctx(ev, fargs.m0, fargs.m1,
                                          fargs.support_b, topts);
            int tested = 0, rejected = 0;
            for (int j = 0; j < ev.p; ++j) {
                if (ev.times[j].empty()) continue;
                ++tested;
                if (ctx.test_node(j).p_value < alpha_level) ++rejected;
            }
            rej = tested > 0 ? (double)rejected / tested : 0.0;
            rejs.push_back(rej);
        }

        csv << r << ',' << ev.total_events() << ',' << sc.f1 << ',' << sc.fnr
            << ',' << sc.fpr << ',' << mse_bg << ',' << mse_tr;
        if (with_test) csv << ',' << rej;
        csv << "\n";
        std::cerr << "rep " << r << ": events=" << ev.total_events()
                  << " f1=" << sc.f1 << " fpr=" << sc.fpr << "\n";
    }

    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / v.size();
    };
    auto stderr_of = [&](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const double m = mean(v);
        double ss = 0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::sqrt(ss / (v.size() - 1) / v.size());
    };
    csv << "# mean,f1=" << mean(f1s) << ",fnr=" << mean(fnrs)
        << ",fpr=" << mean(fprs) << ",mse_background=" << mean(mses_bg)
        << ",mse_transfer=" << mean(mses_tr);
    if (with_test) csv << ",rejection_rate=" << mean(rejs);
    csv << "\n";
    csv << "# stderr,f1=" << stderr_of(f1s) << ",fnr=" << stderr_of(fnrs)
        << ",fpr=" << stderr_of(fprs)
        << ",mse_background=" << stderr_of(mses_bg)
        << ",mse_transfer=" << stderr_of(mses_tr);
    if (with_test) csv << ",rejection_rate=" << stderr_of(rejs);
    csv << "\n";

    if (out_path.empty())
        std::cout << csv.str();
    else
        write_file(out_path, csv.str());
    return all_converged ? 0 : kExitNonConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonstationary multivariate Hawkes network estimation"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Sample event streams from a model");
    ModelArgs sim_model;
    sim_model.attach(sim);
    std::uint64_t sim_seed = 1;
    int sim_iterative = 0;
    std::string sim_out, sim_model_out;
    sim->add_option("--seed", sim_seed, "Simulation seed")->capture_default_str();
    sim->add_option("--iterative", sim_iterative,
                    "Use the iterative thinning construction with this many rounds");
    sim->add_option("-o,--out", sim_out, "Output events CSV (default: stdout)");
    sim->add_option("--model-out", sim_model_out, "Write the realized ModelSpec JSON");

    // fit
    auto* fit = app.add_subcommand("fit", "Estimate the network from events");
    FitArgs fit_args;
    fit_args.attach(fit);
    std::string fit_events, fit_out, fit_gic_out;
    int fit_p = 0;
    double fit_T = 0.0;
    fit->add_option("--events", fit_events, "Events CSV/JSONL")->required();
    fit->add_option("-p,--nodes", fit_p, "Number of nodes")->required();
    fit->add_option("-T,--horizon", fit_T, "Observation horizon")->required();
    fit->add_option("-o,--out", fit_out, "FittedModel JSON (default: stdout)");
    fit->add_option("--gic-out", fit_gic_out, "Per-eta GIC path CSV");

    // test
    auto* tst = app.add_subcommand("test", "Constant-background hypothesis test");
    FitArgs test_args;
    test_args.attach(tst);
    std::string test_events, test_out;
    int test_p = 0, test_node = -1;
    double test_T = 0.0, alpha_level = 0.05;
    tst->add_option("--events", test_events, "Events CSV/JSONL")->required();
    tst->add_option("-p,--nodes", test_p, "Number of nodes")->required();
    tst->add_option("-T,--horizon", test_T, "Observation horizon")->required();
    tst->add_option("--node", test_node, "Single node to test (default: all)");
    tst->add_option("--alpha-level", alpha_level, "Rejection level")
        ->capture_default_str();
    tst->add_option("-o,--out", test_out, "Report CSV (default: stdout)");

    // replicate
    auto* rep = app.add_subcommand(
        "replicate", "Loop simulate -> fit -> evaluate over seeds");
    ModelArgs rep_model;
    rep_model.attach(rep);
    FitArgs rep_fit;
    rep_fit.attach(rep);
    std::uint64_t rep_seed = 1;
    int rep_reps = 10;
    bool rep_with_test = false;
    double rep_alpha = 0.05;
    std::string rep_out;
    rep->add_option("--seed", rep_seed, "Base seed")->capture_default_str();
    rep->add_option("--reps", rep_reps, "Replication count")->capture_default_str();
    rep->add_flag("--with-test", rep_with_test, "Also run the background test");
    rep->add_option("--alpha-level", rep_alpha, "Test rejection level")
        ->capture_default_str();
    rep->add_option("-o,--out", rep_out, "Summary CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_model, sim_seed, sim_iterative, sim_out,
                                sim_model_out);
        if (fit->parsed())
            return cmd_fit(fit_events, fit_p, fit_T, fit_args, fit_out,
                           fit_gic_out);
        if (tst->parsed())
            return cmd_test(test_events, test_p, test_T, test_args, alpha_level,
                            test_node, test_out);
        if (rep->parsed())
            return cmd_replicate(rep_model, rep_fit, rep_seed, rep_reps,
                                 rep_with_test, rep_alpha, rep_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}

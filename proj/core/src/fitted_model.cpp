#include "hawkesnet/fitted_model.hpp"

#include <json.hpp>

namespace hawkesnet {

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vector vector_from_json(const json& a) {
    Vector v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[(Eigen::Index)i] = a[i].get<double>();
    return v;
}

json basis_to_json(const SplineBasis& b) {
    return json{{"order", b.order()},
                {"dimension", b.dimension()},
                {"a1", b.a1()},
                {"a2", b.a2()},
                {"constant_first", b.first_element_constant()}};
}

SplineBasis basis_from_json(const json& j) {
    const int order = j.at("order").get<int>();
    const int dim = j.at("dimension").get<int>();
    const double a1 = j.at("a1").get<double>();
    const double a2 = j.at("a2").get<double>();
    if (j.value("constant_first", false))
        return SplineBasis::make_constant_first(order, dim, a1, a2);
    return SplineBasis::make(order, dim, a1, a2);
}

}  // namespace

double FittedModel::background(int j, double t) const {
    const Vector& beta = fits.at(j).beta;
    return basis0.eval(t).dot(beta.head(m0()));
}

Vector FittedModel::transfer_coef(int j, int k) const {
    const Vector& beta = fits.at(j).beta;
    return beta.segment(m0() + k * m1(), m1());
}

double FittedModel::transfer(int j, int k, double x) const {
    if (x < basis1.a1() || x > basis1.a2()) return 0.0;
    return basis1.eval(x).dot(transfer_coef(j, k));
}

EdgeSet FittedModel::edge_set() const {
    EdgeSet edges;
    for (int j = 0; j < p; ++j)
        for (int k : fits.at(j).active_set) edges.insert({j, k - 1});
    return edges;
}

std::string FittedModel::to_json() const {
    json out;
    out["p"] = p;
    out["horizon_T"] = horizon_T;
    out["basis0"] = basis_to_json(basis0);
    out["basis1"] = basis_to_json(basis1);
    json nodes = json::array();
    for (const NodeFit& f : fits) {
        json n;
        n["node"] = f.node_j;
        n["eta"] = f.eta;
        n["loss"] = f.loss_value;
        n["iterations"] = f.iterations;
        n["converged"] = f.converged;
        n["active_set"] = f.active_set;
        n["beta"] = vector_to_json(f.beta);
        nodes.push_back(std::move(n));
    }
    out["nodes"] = std::move(nodes);
    return out.dump(2);
}

FittedModel FittedModel::from_json(const std::string& text) {
    const json in = json::parse(text);
    FittedModel m;
    m.p = in.at("p").get<int>();
    m.horizon_T = in.at("horizon_T").get<double>();
    m.basis0 = basis_from_json(in.at("basis0"));
    m.basis1 = basis_from_json(in.at("basis1"));
    for (const json& n : in.at("nodes")) {
        NodeFit f;
        f.node_j = n.at("node").get<int>();
        f.eta = n.at("eta").get<double>();
        f.loss_value = n.at("loss").get<double>();
        f.iterations = n.at("iterations").get<int>();
        f.converged = n.at("converged").get<bool>();
        f.active_set = n.at("active_set").get<std::set<int>>();
        f.beta = vector_from_json(n.at("beta"));
        m.fits.push_back(std::move(f));
    }
    if ((int)m.fits.size() != m.p)
        throw EstimatorError("fitted model: node count mismatch");
    return m;
}

FittedModel assemble_fitted(const DesignCache& design,
                            std::vector<NodeFit> fits) {
    if ((int)fits.size() != design.p)
        throw EstimatorError("assemble_fitted: expected one fit per node");
    FittedModel m;
    m.basis0 = design.basis0;
    m.basis1 = design.basis1;
    m.p = design.p;
    m.horizon_T = design.horizon_T;
    m.fits = std::move(fits);
    return m;
}

}  // namespace hawkesnet

#include "hawkesnet/inference.hpp"

#include <cmath>

#include "hawkesnet/special_functions.hpp"

namespace hawkesnet {

BackgroundTestContext::BackgroundTestContext(const EventData& events, int m0,
                                             int m1, double support_b,
                                             const TestOptions& opts)
    : opts_(opts) {
    const double factor = std::pow(events.horizon_T, opts.undersmooth_exponent);
    m0_test_ = (int)std::ceil(m0 * factor);
    m1_test_ = (int)std::ceil(m1 * factor);
    m0_test_ = std::max(m0_test_, std::max(2, opts.order0));
    m1_test_ = std::max(m1_test_, opts.order1);

    const SplineBasis basis0 = SplineBasis::make_constant_first(
        opts.order0, m0_test_, 0.0, events.horizon_T);
    const SplineBasis basis1 =
        SplineBasis::make(opts.order1, m1_test_, 0.0, support_b);
    design_ = std::make_unique<DesignCache>(
        build_design(events, basis0, basis1, opts.design));
    factors_ = std::make_unique<BlockFactors>(*design_);
}

BackgroundTest BackgroundTestContext::test_node(int j) const {
    const DesignCache& d = *design_;
    if (d.event_counts[j] == 0)
        throw EstimatorError("background test undefined for a node with no events");

    BackgroundTest out;
    out.node_j = j;
    out.m0_test = m0_test_;
    out.m1_test = m1_test_;

    out.support = select_eta(*factors_, j, opts_.select).best.active_set;

    const NodeFit free_fit = refit(*factors_, j, out.support, false);
    const NodeFit null_fit = refit(*factors_, j, out.support, true);

    double s = d.horizon_T * (null_fit.loss_value - free_fit.loss_value);
    const double slack =
        1e-8 * std::max(1.0, std::abs(free_fit.loss_value)) * d.horizon_T;
    if (s < -slack)
        throw EstimatorError("nested losses out of order (internal error)");
    if (s < 0.0) s = 0.0;
    out.s_stat = s;

    // Plug-in mean intensity: grid average of the linear predictor, no relu
    // clipping; clipping would bias the scale downward under inhibition.
    out.lambda_bar = d.psi_mean.dot(free_fit.beta);
    if (out.lambda_bar <= 0.0)
        throw EstimatorError("nonpositive fitted mean intensity for node " +
                             std::to_string(j));

    out.dof = m0_test_ - 1;
    out.statistic = out.s_stat / out.lambda_bar;
    out.p_value = chi_square_upper_tail(out.statistic, out.dof);
    return out;
}

BackgroundTest test_background(const EventData& events, int j, int m0, int m1,
                               double support_b, const TestOptions& opts) {
    return BackgroundTestContext(events, m0, m1, support_b, opts).test_node(j);
}

}  // namespace hawkesnet

#pragma once

#include <memory>

#include "hawkesnet/selection.hpp"

namespace hawkesnet {

struct BackgroundTest {
    int node_j = -1;
    double s_stat = 0.0;       // T * (restricted loss - free loss), >= 0
    double lambda_bar = 0.0;   // (1/T) int of the fitted linear predictor
    int dof = 0;               // under-smoothed m0 - 1
    double statistic = 0.0;    // s_stat / lambda_bar
    double p_value = 1.0;
    int m0_test = 0, m1_test = 0;
    std::set<int> support;
};

struct TestOptions {
    // Basis dimensions are inflated by ceil(m * T^undersmooth_exponent).
    double undersmooth_exponent = 0.05;  // T^(1/20)
    int order0 = 4;
    int order1 = 4;
    DesignOptions design;
    SelectOptions select;
};

// Shared per-dataset state for testing all nodes: one under-smoothed design
// whose background basis has the constant function as its first element.
class BackgroundTestContext {
public:
    BackgroundTestContext(const EventData& events, int m0, int m1,
                          double support_b, const TestOptions& opts = {});

    int m0_test() const { return m0_test_; }
    int m1_test() const { return m1_test_; }
    const DesignCache& design() const { return *design_; }

    BackgroundTest test_node(int j) const;

private:
    int m0_test_ = 0, m1_test_ = 0;
    TestOptions opts_;
    std::unique_ptr<DesignCache> design_;
    std::unique_ptr<BlockFactors> factors_;
};

// One-shot per-node test: under-smooth (m0, m1), refit the GIC-selected
// support freely and under the constant-background restriction, and compare
// S_j / lambda_bar against the chi-square upper tail with m0_test - 1 dof.
BackgroundTest test_background(const EventData& events, int j, int m0, int m1,
                               double support_b, const TestOptions& opts = {});

}  // namespace hawkesnet

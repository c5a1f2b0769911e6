#pragma once

#include <vector>

namespace nsverify {

/// Data of the generalised Gronwall condition
///   8 (1+T) ( B1 (8AM)^beta1 + B2 (8AM)^beta2 ) <= 1,  M = exp(alpha_integral).
struct GronwallInput {
    double T = 0.0;
    double A = 0.0;
    double B1 = 0.0;
    double B2 = 0.0;
    double beta1 = 2.0 / 3.0;
    double beta2 = 1.0 / 3.0;
    double alpha_integral = 0.0;
};

struct GronwallVerdict {
    double M = 1.0;
    double condition_lhs = 0.0;
    bool satisfied = false;
    double bound = 0.0;  // 2 A M, valid when satisfied
};

GronwallVerdict evaluate(const GronwallInput& in);

/// Discrete check of the integral-inequality hypothesis
///   g1(t) + int_0^t g2 <= A + int_0^t alpha g1
///                         + sum_i B_i (sup g1)^{beta_i} int_0^t (g1 + g2)
/// at every grid node, trapezoidal quadrature, tolerance 1e-10 * data scale.
bool check_hypothesis(const std::vector<double>& g1,
                      const std::vector<double>& g2,
                      const std::vector<double>& alpha, const GronwallInput& in,
                      const std::vector<double>& grid);

}  // namespace nsverify

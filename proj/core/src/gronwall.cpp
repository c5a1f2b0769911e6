#include "nsverify/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsverify {

namespace {

void validate(const GronwallInput& in) {
    const double vals[] = {in.T,  in.A,     in.B1,            in.B2,
                           in.beta1, in.beta2, in.alpha_integral};
    for (double v : vals)
        if (std::isnan(v))
            throw std::invalid_argument("gronwall: NaN input");
    if (in.T <= 0.0) throw std::invalid_argument("gronwall: T must be > 0");
    if (in.A < 0.0 || in.B1 < 0.0 || in.B2 < 0.0 || in.alpha_integral < 0.0)
        throw std::invalid_argument("gronwall: negative input");
    if (!(in.beta1 > 0.0 && in.beta1 <= 1.0) ||
        !(in.beta2 > 0.0 && in.beta2 <= 1.0))
        throw std::invalid_argument("gronwall: exponents must lie in (0,1]");
}

}  // namespace

GronwallVerdict evaluate(const GronwallInput& in) {
    validate(in);
    GronwallVerdict v;
    v.M = std::exp(in.alpha_integral);
    const double eightAM = 8.0 * in.A * v.M;
    v.condition_lhs = 8.0 * (1.0 + in.T) *
                      (in.B1 * std::pow(eightAM, in.beta1) +
                       in.B2 * std::pow(eightAM, in.beta2));
    v.satisfied = v.condition_lhs <= 1.0;
    v.bound = 2.0 * in.A * v.M;
    return v;
}

bool check_hypothesis(const std::vector<double>& g1,
                      const std::vector<double>& g2,
                      const std::vector<double>& alpha, const GronwallInput& in,
                      const std::vector<double>& grid) {
    validate(in);
    const std::size_t n = grid.size();
    if (g1.size() != n || g2.size() != n || alpha.size() != n || n < 2)
        throw std::invalid_argument("check_hypothesis: mismatched grids");

    double sup_g1 = 0.0;
    double scale = in.A;
    for (std::size_t k = 0; k < n; ++k) {
        sup_g1 = std::max(sup_g1, g1[k]);
        scale = std::max({scale, std::abs(g1[k]), std::abs(g2[k])});
    }
    const double feedback = in.B1 * std::pow(sup_g1, in.beta1) +
                            in.B2 * std::pow(sup_g1, in.beta2);
    const double tol = 1e-10 * std::max(1.0, scale);

    double int_g2 = 0.0, int_ag1 = 0.0, int_g12 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            const double dt = grid[k] - grid[k - 1];
            int_g2 += 0.5 * dt * (g2[k] + g2[k - 1]);
            int_ag1 += 0.5 * dt * (alpha[k] * g1[k] + alpha[k - 1] * g1[k - 1]);
            int_g12 += 0.5 * dt * (g1[k] + g2[k] + g1[k - 1] + g2[k - 1]);
        }
        const double lhs = g1[k] + int_g2;
        const double rhs = in.A + int_ag1 + feedback * int_g12;
        if (lhs > rhs + tol) return false;
    }
    return true;
}

}  // namespace nsverify

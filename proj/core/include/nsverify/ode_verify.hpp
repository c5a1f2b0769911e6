#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nsverify {

/// Implicit Euler step for y' = y^2 has no real solution when the
/// discriminant 1 - 4 tau y_{i-1} turns negative; the step size must shrink
/// near blow-up.
struct StepUnsolvable : std::runtime_error {
    int step;
    explicit StepUnsolvable(int step_)
        : std::runtime_error("implicit Euler step " + std::to_string(step_) +
                             " unsolvable: discriminant < 0"),
          step(step_) {}
};

struct OdeTrajectory {
    double y0 = 0.0;
    double tau = 0.0;
    std::vector<double> t;  // t_i = i tau
    std::vector<double> y;  // y_0 .. y_m
    double T = 0.0;
    bool truncated = false;  // stopped early at an unsolvable step
    int fail_step = -1;

    int steps() const { return static_cast<int>(y.size()) - 1; }
};

struct OdeCertificate {
    double A = 0.0;  // int |r|^2
    double M = 1.0;  // exp( int (4|yhat| + 1) )
    double condition_lhs = 0.0;
    bool satisfied = false;
    double bound = 0.0;  // 2 A M
};

/// Runs n_steps implicit Euler steps; throws StepUnsolvable if any step has a
/// negative discriminant.
OdeTrajectory euler_solve(double y0, double tau, int n_steps);
/// Same, but truncates at the first unsolvable step instead of throwing, so
/// the certificate can be evaluated on the interval where the interpolant
/// exists.
OdeTrajectory euler_solve_available(double y0, double tau, int n_steps);

/// Piecewise-quadratic residual r(t) = yhat'(t) - yhat(t)^2 of the affine
/// interpolant.
double residual_value(const OdeTrajectory& traj, double t);
/// A = int_0^T |r|^2, integrated slab-by-slab with a Gauss rule exact for the
/// degree-4 integrand.
double residual_l2_squared(const OdeTrajectory& traj);
/// A restricted to the first n slabs.
double residual_l2_squared_prefix(const OdeTrajectory& traj, int n);

/// exp-exponent int_0^{t_n} (4|yhat| + 1), exact for the affine interpolant.
double alpha_integral_prefix(const OdeTrajectory& traj, int n);

OdeCertificate certify(const OdeTrajectory& traj);
/// Certificates of all node prefixes t_1..t_m; certified_T is the largest
/// satisfied node (0 when none).
struct OdePrefixReport {
    std::vector<OdeCertificate> rows;
    double certified_T = 0.0;
};
OdePrefixReport certify_prefixes(const OdeTrajectory& traj);

std::string certificate_json(const OdeTrajectory& traj,
                             const OdeCertificate& cert, double certified_T);

}  // namespace nsverify

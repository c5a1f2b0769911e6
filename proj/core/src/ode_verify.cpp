#include "nsverify/ode_verify.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nsverify/gronwall.hpp"
#include "nsverify/quadrature.hpp"

namespace nsverify {

namespace {

OdeTrajectory solve_impl(double y0, double tau, int n_steps, bool truncate) {
    if (!(y0 >= 0.0)) throw std::invalid_argument("euler_solve: y0 must be >= 0");
    if (!(tau > 0.0)) throw std::invalid_argument("euler_solve: tau must be > 0");
    if (n_steps < 1) throw std::invalid_argument("euler_solve: need >= 1 step");
    OdeTrajectory traj;
    traj.y0 = y0;
    traj.tau = tau;
    traj.t.push_back(0.0);
    traj.y.push_back(y0);
    for (int i = 1; i <= n_steps; ++i) {
        const double prev = traj.y.back();
        const double disc = 1.0 - 4.0 * tau * prev;
        if (disc < 0.0) {
            if (!truncate) throw StepUnsolvable(i);
            traj.truncated = true;
            traj.fail_step = i;
            break;
        }
        // Smaller root of tau y^2 - y + prev = 0 in cancellation-free form;
        // the larger root does not follow the flow as tau -> 0.
        const double yi = 2.0 * prev / (1.0 + std::sqrt(disc));
        traj.t.push_back(i * tau);
        traj.y.push_back(yi);
    }
    if (traj.steps() < 1)
        throw StepUnsolvable(1);
    traj.T = traj.t.back();
    return traj;
}

const LineQuadrature& slab_rule() {
    static const LineQuadrature rule = make_line_quadrature(3);  // degree 5
    return rule;
}

}  // namespace

OdeTrajectory euler_solve(double y0, double tau, int n_steps) {
    return solve_impl(y0, tau, n_steps, /*truncate=*/false);
}

OdeTrajectory euler_solve_available(double y0, double tau, int n_steps) {
    return solve_impl(y0, tau, n_steps, /*truncate=*/true);
}

double residual_value(const OdeTrajectory& traj, double t) {
    if (t < 0.0 || t > traj.T)
        throw std::out_of_range("residual_value: t outside trajectory");
    int i = std::min(static_cast<int>(t / traj.tau) + 1, traj.steps());
    const double s = (t - traj.t[i - 1]) / traj.tau;
    const double yhat = traj.y[i - 1] + s * (traj.y[i] - traj.y[i - 1]);
    const double slope = (traj.y[i] - traj.y[i - 1]) / traj.tau;
    return slope - yhat * yhat;
}

double residual_l2_squared_prefix(const OdeTrajectory& traj, int n) {
    const auto& rule = slab_rule();
    double A = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double slope = (traj.y[i] - traj.y[i - 1]) / traj.tau;
        double slab = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
            const double s = rule.points[q];
            const double yhat = traj.y[i - 1] + s * (traj.y[i] - traj.y[i - 1]);
            const double r = slope - yhat * yhat;
            slab += rule.weights[q] * r * r;
        }
        A += traj.tau * slab;
    }
    return A;
}

double residual_l2_squared(const OdeTrajectory& traj) {
    return residual_l2_squared_prefix(traj, traj.steps());
}

double alpha_integral_prefix(const OdeTrajectory& traj, int n) {
    // |yhat| is affine on each slab and nonnegative for nonnegative data.
    double integral = traj.t[n];
    for (int i = 1; i <= n; ++i)
        integral += 4.0 * traj.tau * 0.5 *
                    (std::abs(traj.y[i - 1]) + std::abs(traj.y[i]));
    return integral;
}

namespace {

OdeCertificate certify_prefix(const OdeTrajectory& traj, int n) {
    GronwallInput in;
    in.T = traj.t[n];
    in.A = residual_l2_squared_prefix(traj, n);
    in.B1 = 1.0;
    in.B2 = 0.0;
    in.beta1 = 0.5;
    in.beta2 = 0.5;
    in.alpha_integral = alpha_integral_prefix(traj, n);
    const GronwallVerdict v = evaluate(in);
    OdeCertificate cert;
    cert.A = in.A;
    cert.M = v.M;
    cert.condition_lhs = v.condition_lhs;
    cert.satisfied = v.satisfied;
    cert.bound = v.bound;
    return cert;
}

}  // namespace

OdeCertificate certify(const OdeTrajectory& traj) {
    if (traj.steps() < 1)
        throw std::invalid_argument("certify: empty trajectory");
    return certify_prefix(traj, traj.steps());
}

OdePrefixReport certify_prefixes(const OdeTrajectory& traj) {
    OdePrefixReport report;
    for (int n = 1; n <= traj.steps(); ++n) {
        report.rows.push_back(certify_prefix(traj, n));
        if (report.rows.back().satisfied) report.certified_T = traj.t[n];
    }
    return report;
}

std::string certificate_json(const OdeTrajectory& traj,
                             const OdeCertificate& cert, double certified_T) {
    std::ostringstream os;
    os.precision(17);
    os << "{\n"
       << "  \"y0\": " << traj.y0 << ",\n"
       << "  \"tau\": " << traj.tau << ",\n"
       << "  \"steps\": " << traj.steps() << ",\n"
       << "  \"T\": " << traj.T << ",\n"
       << "  \"truncated\": " << (traj.truncated ? "true" : "false") << ",\n"
       << "  \"A\": " << cert.A << ",\n"
       << "  \"M\": " << cert.M << ",\n"
       << "  \"conditionLhs\": " << cert.condition_lhs << ",\n"
       << "  \"satisfied\": " << (cert.satisfied ? "true" : "false") << ",\n"
       << "  \"bound\": " << cert.bound << ",\n"
       << "  \"certifiedT\": " << certified_T << "\n"
       << "}\n";
    return os.str();
}

}  // namespace nsverify

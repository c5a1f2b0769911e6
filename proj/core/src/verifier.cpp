#include "nsverify/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nsverify {

namespace {

CellField negated(CellField f) {
    f *= -1.0;
    return f;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

EstimateLedger build_ledger(const FeSpacePair& sp, const Trajectory& traj,
                            const ConstantsTable& cst, const Forcing& forcing,
                            const InitialDataError& e0) {
    EstimateLedger ledger;
    const int n_nodes = static_cast<int>(traj.nodes.size());
    ledger.nodes.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        const TrajectoryNode& node = traj.nodes[i];
        NodeEstimates& est = ledger.nodes[i];
        est.t = node.t;
        const EstimatorBreakdown eb =
            estimate(sp, node.u, node.pi, negated(node.F), traj.nu, cst);
        est.H0 = eb.H0;
        est.H1 = eb.H1;
        est.u_L6 = norm(sp, node.u, NormKind::L6);
        est.u_W12 = norm(sp, node.u, NormKind::W12);
        est.uhat_L6 = cst.c_e1 * est.H1 + est.u_L6;
        est.uhat_H1 = est.H1 + est.u_W12;
    }

    NodeEstimateInput node_input;
    node_input.H1.resize(n_nodes);
    node_input.norm_w12.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        node_input.H1[i] = ledger.nodes[i].H1;
        node_input.norm_w12[i] = ledger.nodes[i].u_W12;
    }
    for (int i = 1; i <= traj.num_slabs(); ++i) {
        ResidualLedgerRow row =
            i == 1 ? bound_first_slab(sp, traj, cst, node_input, forcing)
                   : bound_slab(sp, traj, i, cst, node_input, forcing);
        for (const auto& f : row.flags)
            if (std::find(ledger.flags.begin(), ledger.flags.end(), f) ==
                ledger.flags.end())
                ledger.flags.push_back(f);
        ledger.slabs.push_back(std::move(row));
    }

    ledger.e0_L2 = e0.l2 + ledger.nodes[0].H0;
    ledger.e0_L3 = e0.l3 + cst.c_e1 * ledger.nodes[0].H1;
    ledger.flags.push_back("lp-norms-quadrature-approximate");
    if (e0.user_certified)
        ledger.flags.push_back("initial-data-error-user-certified");
    if (!cst.user_certified.empty())
        ledger.flags.push_back("constants-user-certified");
    return ledger;
}

double accumulate_A(const EstimateLedger& ledger, const ConstantsTable& cst,
                    double nu, double tau, int n) {
    if (n > static_cast<int>(ledger.slabs.size()))
        throw std::out_of_range("accumulate_A: ledger incomplete");
    double A = ledger.e0_L3 * ledger.e0_L3 * ledger.e0_L3 / 3.0 +
               0.5 * ledger.e0_L2 * ledger.e0_L2;
    const double c3 = cst.c_Pi2 * cst.c_Pi2 * cst.c_Pi2 / 3.0 *
                      (1.0 + 16.0 / std::pow(nu, 1.5));
    const double c2 = 0.5 + 1.0 / nu;
    for (int i = 1; i <= n; ++i) {
        const double w13 = ledger.slabs[i - 1].total_w13;
        const double w12 = ledger.slabs[i - 1].total_w12;
        A += tau * (c3 * w13 * w13 * w13 + c2 * w12 * w12);
    }
    return A;
}

double accumulate_alpha(const EstimateLedger& ledger,
                        const ConstantsTable& cst, double nu, double tau,
                        int n) {
    if (n >= static_cast<int>(ledger.nodes.size()))
        throw std::out_of_range("accumulate_alpha: ledger incomplete");
    double integral = 0.0;
    for (int i = 1; i <= n; ++i) {
        // Affine-in-time reconstruction: norms on a slab are bounded by the
        // endpoint maximum.
        const double m =
            std::max(ledger.nodes[i - 1].uhat_L6, ledger.nodes[i].uhat_L6);
        integral += tau * (4.0 + nu / 3.0 + 4.0 * cst.c_e1 / nu * m * m +
                           108.0 * cst.c_e1 * cst.c_e1 / (nu * nu * nu) * m *
                               m * m * m);
    }
    return integral;
}

BPair compute_B(const EstimateLedger& ledger, const ConstantsTable& cst,
                double nu, int n) {
    if (n >= static_cast<int>(ledger.nodes.size()))
        throw std::out_of_range("compute_B: ledger incomplete");
    BPair b;
    const double common = cst.c_Pi1 * cst.c_Pi1 * cst.c_e1 * cst.c_e1 *
                          (1.0 + 2.0 / nu) / (2.0 * nu);
    b.B1 = std::pow(3.0, 8.0 / 3.0) * common;
    double sup_h1 = 0.0;
    for (int i = 0; i <= n; ++i)
        sup_h1 = std::max(sup_h1, ledger.nodes[i].uhat_H1);
    b.B2 = std::pow(3.0, 7.0 / 3.0) * common * cst.c_e1 * cst.c_e1 * sup_h1 *
           sup_h1;
    return b;
}

VerificationReport certify(const FeSpacePair& sp, const Trajectory& traj,
                           const EstimateLedger& ledger,
                           const ConstantsTable& cst,
                           const std::string& config_hash) {
    VerificationReport report;
    report.constants = cst;
    report.mesh_n = sp.mesh().n();
    report.h = sp.mesh().max_h();
    report.tau = traj.tau;
    report.nu = traj.nu;
    report.flags = ledger.flags;
    report.config_hash = config_hash;

    int certified_n = 0;
    for (int n = 1; n <= traj.num_slabs(); ++n) {
        ReportRow row;
        row.t = traj.nodes[n].t;
        row.A = accumulate_A(ledger, cst, traj.nu, traj.tau, n);
        row.alpha_int = accumulate_alpha(ledger, cst, traj.nu, traj.tau, n);
        const BPair b = compute_B(ledger, cst, traj.nu, n);
        row.B1 = b.B1;
        row.B2 = b.B2;
        GronwallInput in;
        in.T = row.t;
        in.A = row.A;
        in.B1 = row.B1;
        in.B2 = row.B2;
        in.beta1 = 2.0 / 3.0;
        in.beta2 = 1.0 / 3.0;
        in.alpha_integral = row.alpha_int;
        const GronwallVerdict v = evaluate(in);
        row.M = v.M;
        row.lhs = v.condition_lhs;
        row.satisfied = v.satisfied;
        report.rows.push_back(row);
        if (row.satisfied) certified_n = n;

        if (!row.satisfied) {
            FailingBreakdown fb;
            fb.t = row.t;
            fb.lhs = row.lhs;
            const double eightAM = 8.0 * row.A * row.M;
            fb.b1_term =
                8.0 * (1.0 + row.t) * row.B1 * std::pow(eightAM, 2.0 / 3.0);
            fb.b2_term =
                8.0 * (1.0 + row.t) * row.B2 * std::pow(eightAM, 1.0 / 3.0);
            fb.dominant = fb.b1_term >= fb.b2_term ? "B1" : "B2";
            // Minimal factor kappa such that scaling A -> A/kappa makes the
            // condition hold with equality: with x = (8AM/kappa)^{1/3},
            //   8(1+T)(B1 x^2 + B2 x) = 1.
            const double c1 = 8.0 * (1.0 + row.t) * row.B1;
            const double c2 = 8.0 * (1.0 + row.t) * row.B2;
            double x_star;
            if (c1 > 0.0)
                x_star = (-c2 + std::sqrt(c2 * c2 + 4.0 * c1)) / (2.0 * c1);
            else
                x_star = c2 > 0.0 ? 1.0 / c2 :
                                    std::numeric_limits<double>::infinity();
            fb.a_reduction_factor = eightAM / (x_star * x_star * x_star);
            report.failing.push_back(fb);
        }
    }

    if (certified_n > 0) {
        report.certified_T = traj.nodes[certified_n].t;
        const ReportRow& row = report.rows[certified_n - 1];
        report.stability_bound = 2.0 * row.A * row.M;
        report.error_bound = conditional_error_bound(report, ledger, cst);
    }
    return report;
}

double conditional_error_bound(const VerificationReport& report,
                               const EstimateLedger& ledger,
                               const ConstantsTable& cst) {
    if (!report.certified_T.has_value()) throw NotCertified{};
    int n = 0;
    for (std::size_t k = 0; k < report.rows.size(); ++k)
        if (report.rows[k].satisfied) n = static_cast<int>(k) + 1;
    const ReportRow& row = report.rows[n - 1];
    double sup_h0 = 0.0, sup_h1 = 0.0;
    for (int i = 0; i <= n; ++i) {
        sup_h0 = std::max(sup_h0, ledger.nodes[i].H0);
        sup_h1 = std::max(sup_h1, ledger.nodes[i].H1);
    }
    return 16.0 * row.A * row.M + sup_h0 * sup_h0 +
           2.0 * report.nu * sup_h1 * sup_h1 +
           4.0 / 3.0 * std::pow(cst.c_e1, 1.5) * std::pow(sup_h0, 1.5) *
               std::pow(sup_h1, 1.5);
}

std::string VerificationReport::to_json() const {
    std::ostringstream os;
    os << "{\n  \"constants\": " << constants.to_json() << ",\n";
    os << "  \"mesh\": {\"n\": " << mesh_n << ", \"h\": " << fmt(h) << "},\n";
    os << "  \"tau\": " << fmt(tau) << ",\n  \"nu\": " << fmt(nu) << ",\n";
    os << "  \"configHash\": \"" << config_hash << "\",\n";
    os << "  \"rows\": [";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const ReportRow& r = rows[k];
        os << (k ? "," : "") << "\n    {\"t\": " << fmt(r.t)
           << ", \"A\": " << fmt(r.A) << ", \"alphaInt\": " << fmt(r.alpha_int)
           << ", \"M\": " << fmt(r.M) << ", \"B1\": " << fmt(r.B1)
           << ", \"B2\": " << fmt(r.B2) << ", \"lhs\": " << fmt(r.lhs)
           << ", \"satisfied\": " << (r.satisfied ? "true" : "false") << "}";
    }
    os << "\n  ],\n";
    os << "  \"certifiedT\": "
       << (certified_T ? fmt(*certified_T) : std::string("null")) << ",\n";
    os << "  \"stabilityBound\": "
       << (stability_bound ? fmt(*stability_bound) : std::string("null"))
       << ",\n";
    os << "  \"errorBound\": "
       << (error_bound ? fmt(*error_bound) : std::string("null")) << ",\n";
    os << "  \"flags\": [";
    for (std::size_t k = 0; k < flags.size(); ++k)
        os << (k ? "," : "") << "\"" << flags[k] << "\"";
    os << "]";
    if (!failing.empty()) {
        os << ",\n  \"failingBreakdown\": [";
        for (std::size_t k = 0; k < failing.size(); ++k) {
            const FailingBreakdown& f = failing[k];
            os << (k ? "," : "") << "\n    {\"t\": " << fmt(f.t)
               << ", \"lhs\": " << fmt(f.lhs) << ", \"b1Term\": "
               << fmt(f.b1_term) << ", \"b2Term\": " << fmt(f.b2_term)
               << ", \"dominant\": \"" << f.dominant
               << "\", \"aReductionFactor\": " << fmt(f.a_reduction_factor)
               << "}";
        }
        os << "\n  ]";
    }
    os << "\n}\n";
    return os.str();
}

}  // namespace nsverify

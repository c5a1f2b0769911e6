#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsverify/constants.hpp"
#include "nsverify/gronwall.hpp"
#include "nsverify/ns_scheme.hpp"
#include "nsverify/residual_bound.hpp"
#include "nsverify/stokes_estimator.hpp"

namespace nsverify {

struct NotCertified : std::runtime_error {
    NotCertified() : std::runtime_error("condition not satisfied at any horizon") {}
};

/// Per-node computable bounds feeding the criterion:
///   uhat_L6 = c_e1 H1 + ||u_h||_{L^6},  uhat_H1 = H1 + ||u_h||_{W^{1,2}}
/// bound the reconstruction at the node.
struct NodeEstimates {
    double t = 0.0;
    double H0 = 0.0;
    double H1 = 0.0;
    double u_L6 = 0.0;
    double u_W12 = 0.0;
    double uhat_L6 = 0.0;
    double uhat_H1 = 0.0;
};

/// Initial-data error against the analytic datum; may be certified externally
/// (e.g. when the discrete field itself is declared to be the datum).
struct InitialDataError {
    double l2 = 0.0;
    double l3 = 0.0;
    bool user_certified = false;
};

struct EstimateLedger {
    std::vector<NodeEstimates> nodes;
    std::vector<ResidualLedgerRow> slabs;  // slabs[i-1] covers (t_{i-1}, t_i)
    double e0_L2 = 0.0;  // ||u0 - u_h^0|| + H0_0
    double e0_L3 = 0.0;  // ||u0 - u_h^0||_{L3} + c_e1 H1_0
    std::vector<std::string> flags;
};

EstimateLedger build_ledger(const FeSpacePair& sp, const Trajectory& traj,
                            const ConstantsTable& constants,
                            const Forcing& forcing,
                            const InitialDataError& e0);

/// A up to node n: (1/3) e0_L3^3 + (1/2) e0_L2^2 plus the slab-resolved
/// residual integral with endpoint-max slab bounds.
double accumulate_A(const EstimateLedger& ledger, const ConstantsTable& cst,
                    double nu, double tau, int n);
/// int_0^{t_n} alpha with the endpoint-max bound of ||uhat||_{L^6} per slab.
double accumulate_alpha(const EstimateLedger& ledger,
                        const ConstantsTable& cst, double nu, double tau,
                        int n);
struct BPair {
    double B1 = 0.0;
    double B2 = 0.0;
};
BPair compute_B(const EstimateLedger& ledger, const ConstantsTable& cst,
                double nu, int n);

struct ReportRow {
    double t = 0.0;
    double A = 0.0;
    double alpha_int = 0.0;
    double M = 1.0;
    double B1 = 0.0;
    double B2 = 0.0;
    double lhs = 0.0;
    bool satisfied = false;
};

struct FailingBreakdown {
    double t = 0.0;
    double lhs = 0.0;
    double b1_term = 0.0;
    double b2_term = 0.0;
    std::string dominant;         // "B1" or "B2"
    double a_reduction_factor = 0.0;  // minimal factor by which A must shrink
};

struct VerificationReport {
    ConstantsTable constants;
    int mesh_n = 0;
    double h = 0.0;
    double tau = 0.0;
    double nu = 0.0;
    std::vector<ReportRow> rows;
    std::optional<double> certified_T;
    std::optional<double> stability_bound;  // 2 A M at the certified horizon
    std::optional<double> error_bound;      // full a posteriori total
    std::vector<std::string> flags;
    std::vector<FailingBreakdown> failing;
    std::string config_hash;

    std::string to_json() const;
};

/// Evaluates the condition at every node horizon t_n and assembles the report.
VerificationReport certify(const FeSpacePair& sp, const Trajectory& traj,
                           const EstimateLedger& ledger,
                           const ConstantsTable& constants,
                           const std::string& config_hash);

/// Conditional a posteriori error bound at the certified horizon:
///   16 A M + sup H0^2 + 2 nu sup H1^2
///          + (4/3) c_e1^{3/2} sup H0^{3/2} sup H1^{3/2}.
/// Throws NotCertified when the report certifies nothing.
double conditional_error_bound(const VerificationReport& report,
                               const EstimateLedger& ledger,
                               const ConstantsTable& constants);

}  // namespace nsverify

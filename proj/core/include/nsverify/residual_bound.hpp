#pragma once

#include <string>
#include <vector>

#include "nsverify/constants.hpp"
#include "nsverify/ns_scheme.hpp"
#include "nsverify/stokes_estimator.hpp"

namespace nsverify {

/// Computable slab bound on the dual norms of the time-reconstruction
/// residual. The five groups (all entering with + sign):
///   1. c_e2 * H0 of the time-differenced Stokes data,
///   2. c_e2 * L2 norm of the discrete second time difference
///      (first slab: the modified strong-form expression at node 0),
///   3. c_e2 c_e1 nu^{-2} c_P^2 * (W^{-1,2} bound of F^i - F^{i-1})^2,
///   4. sum_{j in {i-1,i}} c_e1 (c_e2+c_e1) H1_j (2 ||u^j||_{W^{1,2}} + H1_j),
///   5. c_e2 * sup-in-time bound of the forcing interpolation error.
struct ResidualLedgerRow {
    int slab = 0;  // interval (t_{i-1}, t_i)
    double term_stokes_h0 = 0.0;
    double term_second_diff = 0.0;
    double term_fdiff_negnorm = 0.0;
    double term_nonlinear = 0.0;
    double term_forcing = 0.0;
    double total_w13 = 0.0;
    double total_w12 = 0.0;  // <= total_w13; L^3 -> L^2 embeds with constant 1
    std::vector<std::string> flags;
};

/// Per-node inputs shared with the certificate ledger.
struct NodeEstimateInput {
    std::vector<double> H1;        // H1_j for every node
    std::vector<double> norm_w12;  // ||u_h^j||_{W^{1,2}}
};

ResidualLedgerRow bound_slab(const FeSpacePair& sp, const Trajectory& traj,
                             int i, const ConstantsTable& constants,
                             const NodeEstimateInput& nodes,
                             const Forcing& forcing);

ResidualLedgerRow bound_first_slab(const FeSpacePair& sp,
                                   const Trajectory& traj,
                                   const ConstantsTable& constants,
                                   const NodeEstimateInput& nodes,
                                   const Forcing& forcing);

/// sup_{t in I_i} || l_i f^i + l_{i-1} f^{i-1} - f(t) ||_{L^2}. Zero and
/// slab-affine forcing give 0 exactly; analytic forcing is sampled at 33
/// uniform times and the result is flagged non-rigorous.
struct ForcingBound {
    double value = 0.0;
    bool exact = true;
};
ForcingBound forcing_interpolation_bound(const FeSpacePair& sp,
                                         const Trajectory& traj, int i,
                                         const Forcing& forcing,
                                         int samples = 33);

std::string ledger_rows_to_csv(const std::vector<ResidualLedgerRow>& rows,
                               double tau);

}  // namespace nsverify

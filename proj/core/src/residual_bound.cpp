#include "nsverify/residual_bound.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nsverify {

namespace {

FeFunction scaled_difference(const FeFunction& a, const FeFunction& b,
                             double scale) {
    FeFunction out = a;
    out.coeff = scale * (a.coeff - b.coeff);
    return out;
}

CellField negated(CellField f) {
    f *= -1.0;
    return f;
}

/// Terms 1, 3, 4, 5 are identical for every slab; only term 2 differs.
ResidualLedgerRow common_terms(const FeSpacePair& sp, const Trajectory& traj,
                               int i, const ConstantsTable& cst,
                               const NodeEstimateInput& nodes,
                               const Forcing& forcing) {
    ResidualLedgerRow row;
    row.slab = i;
    const double inv_tau = 1.0 / traj.tau;

    // (1) Stokes reliability bound of the time-differenced data. The
    // difference of Galerkin solutions solves the difference problem, so the
    // estimator applies verbatim.
    const FeFunction du =
        scaled_difference(traj.nodes[i].u, traj.nodes[i - 1].u, inv_tau);
    const FeFunction dpi =
        scaled_difference(traj.nodes[i].pi, traj.nodes[i - 1].pi, inv_tau);
    CellField dF = traj.nodes[i].F;
    dF -= traj.nodes[i - 1].F;
    dF *= inv_tau;
    row.term_stokes_h0 =
        cst.c_e2 * estimate(sp, du, dpi, negated(dF), traj.nu, cst).H0;

    // (3) squared W^{-1,2} bound of F^i - F^{i-1} via the discrete Poisson
    // route.
    CellField fdiff = traj.nodes[i].F;
    fdiff -= traj.nodes[i - 1].F;
    const NegativeNormBound nn = negative_norm_w12(sp, fdiff, cst);
    row.term_fdiff_negnorm = cst.c_e2 * cst.c_e1 / (traj.nu * traj.nu) *
                             cst.c_P * cst.c_P * nn.bound * nn.bound;

    // (4) nonlinear coupling through the node reliability bounds.
    for (int j = i - 1; j <= i; ++j)
        row.term_nonlinear +=
            cst.c_e1 * (cst.c_e2 + cst.c_e1) * nodes.H1[j] *
            (2.0 * nodes.norm_w12[j] + nodes.H1[j]);

    // (5) forcing interpolation error.
    const ForcingBound fb = forcing_interpolation_bound(sp, traj, i, forcing);
    row.term_forcing = cst.c_e2 * fb.value;
    if (!fb.exact) row.flags.push_back("forcing-sampled-nonrigorous");
    row.flags.push_back("negative-norm-poisson-estimator");
    return row;
}

void finalize(ResidualLedgerRow& row) {
    row.total_w13 = row.term_stokes_h0 + row.term_second_diff +
                    row.term_fdiff_negnorm + row.term_nonlinear +
                    row.term_forcing;
    // The same number bounds the W^{-1,2} norm: on the unit-volume torus the
    // embedding constant between the dual norms is 1.
    row.total_w12 = row.total_w13;
}

}  // namespace

ResidualLedgerRow bound_slab(const FeSpacePair& sp, const Trajectory& traj,
                             int i, const ConstantsTable& cst,
                             const NodeEstimateInput& nodes,
                             const Forcing& forcing) {
    if (i < 2 || i > traj.num_slabs())
        throw std::out_of_range(
            "bound_slab: needs nodes i-2, i-1, i; use bound_first_slab for "
            "i = 1");
    ResidualLedgerRow row = common_terms(sp, traj, i, cst, nodes, forcing);

    // (2) second time difference, exact through the mass matrix.
    FeFunction dd = traj.nodes[i].u;
    dd.coeff = (traj.nodes[i].u.coeff - 2.0 * traj.nodes[i - 1].u.coeff +
                traj.nodes[i - 2].u.coeff) /
               traj.tau;
    row.term_second_diff = cst.c_e2 * norm(sp, dd, NormKind::L2);
    finalize(row);
    return row;
}

ResidualLedgerRow bound_first_slab(const FeSpacePair& sp,
                                   const Trajectory& traj,
                                   const ConstantsTable& cst,
                                   const NodeEstimateInput& nodes,
                                   const Forcing& forcing) {
    if (traj.num_slabs() < 1)
        throw std::out_of_range("bound_first_slab: empty trajectory");
    ResidualLedgerRow row = common_terms(sp, traj, 1, cst, nodes, forcing);

    // (2), first slab: strong-form expression at node 0,
    //   d_tau u^1 + (1/2) u^0 . grad u^0 + div(u^0 (x) u^0) - F^0 - f^0,
    // where F^0 = nu Lap_h u^0 - grad_h pi^0 is the node-0 Stokes data.
    const FeFunction& u1 = traj.nodes[1].u;
    const FeFunction& u0 = traj.nodes[0].u;
    const CellField& F0 = traj.nodes[0].F;
    const CellField& f0 = traj.nodes[0].f;
    const double inv_tau = 1.0 / traj.tau;
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    double acc = 0.0;
    for (int c = 0; c < nc; ++c)
        for (int q = 0; q < nq; ++q) {
            const VelocitySample s0 = sample_velocity(sp, u0, c, q);
            const Eigen::Vector3d v1 = sample_velocity(sp, u1, c, q).value;
            const Eigen::Vector3d conv = s0.grad.transpose() * s0.value;
            // div(u (x) u) = (div u) u + u.grad u pointwise.
            Eigen::Vector3d val = inv_tau * (v1 - s0.value) + 0.5 * conv +
                                  (s0.grad.trace() * s0.value + conv) -
                                  F0.at(c, q);
            if (!f0.empty()) val -= f0.at(c, q);
            acc += sp.cell_weight(c, q) * val.squaredNorm();
        }
    row.term_second_diff = cst.c_e2 * std::sqrt(acc);
    finalize(row);
    return row;
}

ForcingBound forcing_interpolation_bound(const FeSpacePair& sp,
                                         const Trajectory& traj, int i,
                                         const Forcing& forcing, int samples) {
    ForcingBound out;
    if (forcing.mode == ForcingMode::zero ||
        forcing.mode == ForcingMode::affine) {
        // The affine-in-time interpolant reproduces slab-affine forcing.
        out.value = 0.0;
        out.exact = true;
        return out;
    }
    if (!forcing.fn)
        throw std::invalid_argument(
            "forcing_interpolation_bound: analytic forcing without a "
            "function");
    if (samples < 2) samples = 2;
    const double t0 = traj.nodes[i - 1].t;
    const double t1 = traj.nodes[i].t;
    const CellField& f_prev = traj.nodes[i - 1].f;
    const CellField& f_next = traj.nodes[i].f;
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    double sup = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t =
            t0 + (t1 - t0) * static_cast<double>(k) / (samples - 1);
        const double l_next = (t - t0) / (t1 - t0);
        const double l_prev = 1.0 - l_next;
        double acc = 0.0;
        for (int c = 0; c < nc; ++c)
            for (int q = 0; q < nq; ++q) {
                const Eigen::Vector3d v = l_prev * f_prev.at(c, q) +
                                          l_next * f_next.at(c, q) -
                                          forcing.fn(t, sp.cell_point(c, q));
                acc += sp.cell_weight(c, q) * v.squaredNorm();
            }
        sup = std::max(sup, std::sqrt(acc));
    }
    out.value = sup;
    out.exact = false;
    return out;
}

std::string ledger_rows_to_csv(const std::vector<ResidualLedgerRow>& rows,
                               double tau) {
    std::ostringstream os;
    os.precision(17);
    os << "slab,t_end,term_stokes_h0,term_second_diff,term_fdiff_negnorm,"
          "term_nonlinear,term_forcing,total_w13,total_w12,flags\n";
    for (const auto& r : rows) {
        os << r.slab << ',' << r.slab * tau << ',' << r.term_stokes_h0 << ','
           << r.term_second_diff << ',' << r.term_fdiff_negnorm << ','
           << r.term_nonlinear << ',' << r.term_forcing << ',' << r.total_w13
           << ',' << r.total_w12 << ',';
        for (std::size_t k = 0; k < r.flags.size(); ++k)
            os << (k ? ";" : "") << r.flags[k];
        os << '\n';
    }
    return os.str();
}

}  // namespace nsverify

#include "nsverify/stokes_estimator.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nsverify/parallel.hpp"

namespace nsverify {

namespace {

/// Trace of n.(grad w - pi I) from one side of a face, at a physical point
/// given in the minus-side frame. shift translates into the owning cell frame.
Eigen::Vector3d side_trace(const FeSpacePair& sp, const FeFunction& w,
                           const FeFunction* pi, int cell,
                           const Eigen::Vector3d& point,
                           const Eigen::Vector3d& shift,
                           const Eigen::Vector3d& normal) {
    const auto& mcell = sp.mesh().cell(cell);
    const Eigen::Vector3d local = point + shift;
    const Eigen::Vector3d ref =
        mcell.jacobian.inverse() * (local - mcell.x[0]);
    const VelocitySample s = sample_velocity_at(sp, w, cell, ref);
    Eigen::Vector3d tr = s.grad.transpose() * normal;  // (n . grad) w
    if (pi) {
        double pval[4];
        p1_basis(ref, pval);
        double p = 0.0;
        for (int a = 0; a < 4; ++a)
            p += pi->coeff[sp.p1_dof(cell, a)] * pval[a];
        tr -= p * normal;
    }
    return tr;
}

}  // namespace

double face_jump_norm_sq(const FeSpacePair& sp, int face, const FeFunction& w,
                         const FeFunction* pi) {
    const auto& f = sp.mesh().face(face);
    const TriQuadrature& rule = sp.face_rule();
    const Eigen::Vector3d e1 = f.x[1] - f.x[0];
    const Eigen::Vector3d e2 = f.x[2] - f.x[0];
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        const Eigen::Vector3d p =
            f.x[0] + rule.points[q][0] * e1 + rule.points[q][1] * e2;
        const Eigen::Vector3d t_minus = side_trace(
            sp, w, pi, f.cell_minus, p, Eigen::Vector3d::Zero(), f.normal);
        const Eigen::Vector3d t_plus =
            side_trace(sp, w, pi, f.cell_plus, p, f.shift_plus, f.normal);
        acc += rule.weights[q] * (t_plus - t_minus).squaredNorm();
    }
    return acc * 2.0 * f.area;  // reference weights sum to 1/2
}

EstimatorBreakdown estimate(const FeSpacePair& sp, const FeFunction& u,
                            const FeFunction& pi, const CellField& F,
                            double nu, const ConstantsTable& constants) {
    const PeriodicMesh& mesh = sp.mesh();
    const int nc = mesh.num_cells();
    const int nq = sp.cell_rule().size();

    const Eigen::Vector3d mean = cell_field_mean(sp, F);
    const double fnorm = cell_field_l2_norm(sp, F);
    if (mean.cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, fnorm))
        throw std::invalid_argument(
            "estimate: data F is not mean-free; the periodic Stokes problem "
            "is ill-posed");

    EstimatorBreakdown out;
    out.element_residual.assign(nc, 0.0);
    out.divergence.assign(nc, 0.0);
    out.jump_sq.assign(nc, 0.0);
    out.oscillation.assign(nc, 0.0);
    out.eta_sq.assign(nc, 0.0);
    out.mu_bar_sq.assign(nc, 0.0);

    parallel_for(nc, [&](int c) {
        const auto& cell = mesh.cell(c);
        const Eigen::Vector3d lap = cell_laplacian(sp, u, c);
        const Eigen::Vector3d gp = cell_pressure_gradient(sp, pi, c);
        Eigen::Vector3d cell_mean = Eigen::Vector3d::Zero();
        for (int q = 0; q < nq; ++q)
            cell_mean += sp.cell_weight(c, q) * F.at(c, q);
        cell_mean /= cell.volume;
        double res2 = 0.0, div2 = 0.0, osc2 = 0.0;
        for (int q = 0; q < nq; ++q) {
            const double w = sp.cell_weight(c, q);
            const VelocitySample s = sample_velocity(sp, u, c, q);
            res2 += w * (F.at(c, q) + nu * lap - gp).squaredNorm();
            const double div = s.grad.trace();
            div2 += w * div * div;
            osc2 += w * (F.at(c, q) - cell_mean).squaredNorm();
        }
        out.element_residual[c] = std::sqrt(res2);
        out.divergence[c] = std::sqrt(div2);
        out.oscillation[c] = std::sqrt(osc2);
    });

    // Face jumps, computed once per face and split evenly.
    const int nf = mesh.num_faces();
    std::vector<double> face_jump(nf, 0.0);
    parallel_for(nf, [&](int fid) {
        face_jump[fid] = face_jump_norm_sq(sp, fid, u, &pi);
    });

    double sum_eta = 0.0, sum_mu_osc = 0.0;
    for (int c = 0; c < nc; ++c) {
        const auto& cell = mesh.cell(c);
        double jump_eta = 0.0, jump_mu = 0.0, jump_raw = 0.0;
        for (int lf = 0; lf < 4; ++lf) {
            const auto& face = mesh.face(cell.face[lf]);
            const double j2 = 0.5 * face_jump[cell.face[lf]];
            jump_raw += j2;
            jump_eta += face.h * j2;
            jump_mu += face.h * face.h * face.h * j2;
        }
        out.jump_sq[c] = jump_raw;
        const double h2 = cell.h * cell.h;
        const double r2 = out.element_residual[c] * out.element_residual[c];
        const double d2 = out.divergence[c] * out.divergence[c];
        out.eta_sq[c] = h2 * r2 + d2 + jump_eta;
        out.mu_bar_sq[c] = h2 * h2 * r2 + h2 * d2 + jump_mu;
        sum_eta += out.eta_sq[c];
        sum_mu_osc += out.mu_bar_sq[c] +
                      h2 * h2 * out.oscillation[c] * out.oscillation[c];
    }
    out.eta_total = std::sqrt(sum_eta);
    out.H0 = constants.c_tilde * std::sqrt(sum_mu_osc);
    out.H1 = std::sqrt(constants.c_H1 * constants.c_H1 * sum_eta +
                       out.H0 * out.H0);
    return out;
}

std::string EstimatorBreakdown::to_csv(const PeriodicMesh& mesh) const {
    std::ostringstream os;
    os.precision(17);
    os << "cell,h_K,element_residual,divergence,jump_sq,oscillation,eta_sq,"
          "mu_bar_sq\n";
    for (std::size_t c = 0; c < eta_sq.size(); ++c)
        os << c << ',' << mesh.cell(static_cast<int>(c)).h << ','
           << element_residual[c] << ',' << divergence[c] << ',' << jump_sq[c]
           << ',' << oscillation[c] << ',' << eta_sq[c] << ',' << mu_bar_sq[c]
           << '\n';
    return os.str();
}

NegativeNormBound negative_norm_w12(const FeSpacePair& sp, const CellField& a,
                                    const ConstantsTable& constants) {
    const PeriodicMesh& mesh = sp.mesh();
    const int nc = mesh.num_cells();
    const int nq = sp.cell_rule().size();
    const int S = sp.num_scalar_dofs();

    const Eigen::Vector3d mean = cell_field_mean(sp, a);
    const double anorm = cell_field_l2_norm(sp, a);
    if (mean.cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, anorm))
        throw std::invalid_argument(
            "negative_norm_w12: input is not componentwise mean-free");

    // Bordered scalar Poisson system: [K g; g^T 0], mean-zero via multiplier.
    const SparseMat& K = sp.scalar_stiffness();
    const Eigen::VectorXd& g = sp.scalar_mean_vector();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(K.nonZeros()) + 2 * S);
    for (int k = 0; k < K.outerSize(); ++k)
        for (SparseMat::InnerIterator it(K, k); it; ++it)
            trips.emplace_back(it.row(), it.col(), it.value());
    for (int s = 0; s < S; ++s) {
        trips.emplace_back(s, S, g[s]);
        trips.emplace_back(S, s, g[s]);
    }
    SparseMat A(S + 1, S + 1);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<SparseMat> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("negative_norm_w12: Poisson solve failed");

    FeFunction phi = sp.zero(SpaceTag::velocity);  // three scalar solutions
    double energy_sq = 0.0;
    for (int comp = 0; comp < 3; ++comp) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S + 1);
        for (int c = 0; c < nc; ++c)
            for (int q = 0; q < nq; ++q) {
                const double w = sp.cell_weight(c, q) * a.at(c, q)[comp];
                for (int s = 0; s < 10; ++s)
                    rhs[sp.p2_dof(c, s)] += w * sp.p2_value(q, s);
            }
        const Eigen::VectorXd x = lu.solve(rhs);
        phi.coeff.segment(comp * S, S) = x.head(S);
        energy_sq += x.head(S).dot(K * x.head(S));
    }

    double element_sq = 0.0;
    for (int c = 0; c < nc; ++c) {
        const double h2 = mesh.cell(c).h * mesh.cell(c).h;
        double a2 = 0.0;
        for (int q = 0; q < nq; ++q)
            a2 += sp.cell_weight(c, q) * a.at(c, q).squaredNorm();
        element_sq += h2 * a2;
    }
    double jump_sq_total = 0.0;
    std::vector<double> face_jump(mesh.num_faces(), 0.0);
    parallel_for(mesh.num_faces(), [&](int fid) {
        face_jump[fid] = face_jump_norm_sq(sp, fid, phi, nullptr);
    });
    for (int fid = 0; fid < mesh.num_faces(); ++fid)
        jump_sq_total += mesh.face(fid).h * face_jump[fid];

    NegativeNormBound out;
    out.discrete_energy = std::sqrt(std::max(energy_sq, 0.0));
    out.estimator = constants.c_H1 * std::sqrt(element_sq + jump_sq_total);
    out.bound = out.discrete_energy + out.estimator;
    return out;
}

}  // namespace nsverify

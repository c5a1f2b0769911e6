#include "nsverify/ns_scheme.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include <nlohmann/json.hpp>

#include "nsverify/parallel.hpp"

namespace nsverify {

namespace {

/// Dual norm sqrt(r^T M^{-1} r) of a velocity functional, componentwise via
/// the scalar mass factorisation.
double dual_norm(const FeSpacePair& sp, const Eigen::VectorXd& r) {
    const int S = sp.num_scalar_dofs();
    double acc = 0.0;
    for (int comp = 0; comp < 3; ++comp) {
        const Eigen::VectorXd rc = r.segment(comp * S, S);
        acc += rc.dot(sp.scalar_mass_solver().solve(rc));
    }
    return std::sqrt(std::max(acc, 0.0));
}

struct NewtonSystem {
    const FeSpacePair& sp;
    double tau, nu;
    Eigen::VectorXd b;  // (1/tau) M u_prev + load(f)
    const SparseMat& D;
    const Eigen::VectorXd& e;

    Eigen::VectorXd momentum_residual(const FeSpacePair& space,
                                      const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& pi) const {
        const int S = space.num_scalar_dofs();
        Eigen::VectorXd r = convection_residual(space, FeFunction{SpaceTag::velocity, u, 0.0});
        for (int comp = 0; comp < 3; ++comp) {
            r.segment(comp * S, S) +=
                (1.0 / tau) * (space.scalar_mass() * u.segment(comp * S, S)) +
                nu * (space.scalar_stiffness() * u.segment(comp * S, S));
        }
        r -= D.transpose() * pi;
        r -= b;
        return r;
    }
};

}  // namespace

VelocityPressure step(const FeSpacePair& sp, const FeFunction& u_prev,
                      const CellField& f_i, double tau, double nu,
                      const NewtonOptions& opts, int step_index,
                      int* iterations_out, double* residual_out) {
    const int S = sp.num_scalar_dofs();
    const int Nu = 3 * S;
    const int Np = sp.num_pressure_dofs();
    const int total = Nu + Np + 1;
    const SparseMat& M = sp.scalar_mass();
    const SparseMat& K = sp.scalar_stiffness();
    const SparseMat& D = sp.divergence();
    const Eigen::VectorXd& e = sp.pressure_mean_vector();

    Eigen::VectorXd b = Eigen::VectorXd::Zero(Nu);
    if (!f_i.empty()) b = cell_field_load_vector(sp, f_i);
    for (int comp = 0; comp < 3; ++comp)
        b.segment(comp * S, S) +=
            (1.0 / tau) * (M * u_prev.coeff.segment(comp * S, S));

    NewtonSystem sys{sp, tau, nu, b, D, e};
    const double scale = std::max(1.0, dual_norm(sp, b));

    Eigen::VectorXd u = u_prev.coeff;
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(Np);

    Eigen::VectorXd r_u = sys.momentum_residual(sp, u, pi);
    double err = dual_norm(sp, r_u);
    int iter = 0;
    for (; iter < opts.max_iterations && err > opts.tolerance * scale; ++iter) {
        const SparseMat Jc =
            convection_jacobian(sp, FeFunction{SpaceTag::velocity, u, 0.0});
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(Jc.nonZeros()) +
                      3 * M.nonZeros() + 2 * D.nonZeros() + 2 * Np);
        for (int comp = 0; comp < 3; ++comp)
            for (int k = 0; k < M.outerSize(); ++k) {
                for (SparseMat::InnerIterator it(M, k); it; ++it)
                    trips.emplace_back(comp * S + it.row(), comp * S + it.col(),
                                       it.value() / tau);
                for (SparseMat::InnerIterator it(K, k); it; ++it)
                    trips.emplace_back(comp * S + it.row(), comp * S + it.col(),
                                       nu * it.value());
            }
        for (int k = 0; k < Jc.outerSize(); ++k)
            for (SparseMat::InnerIterator it(Jc, k); it; ++it)
                trips.emplace_back(it.row(), it.col(), it.value());
        for (int k = 0; k < D.outerSize(); ++k)
            for (SparseMat::InnerIterator it(D, k); it; ++it) {
                trips.emplace_back(Nu + it.row(), it.col(), it.value());
                trips.emplace_back(it.col(), Nu + it.row(), -it.value());
            }
        for (int q = 0; q < Np; ++q) {
            trips.emplace_back(Nu + q, Nu + Np, e[q]);
            trips.emplace_back(Nu + Np, Nu + q, e[q]);
        }
        SparseMat J(total, total);
        J.setFromTriplets(trips.begin(), trips.end());

        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
        rhs.head(Nu) = -r_u;
        rhs.segment(Nu, Np) = -(D * u);  // constraint residual
        rhs[Nu + Np] = -e.dot(pi);

        Eigen::SparseLU<SparseMat> lu;
        lu.analyzePattern(J);
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw StepFailed(step_index, err);
        const Eigen::VectorXd delta = lu.solve(rhs);

        // Backtracking damping: halve until the dual residual decreases.
        double s = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            const Eigen::VectorXd u_try = u + s * delta.head(Nu);
            const Eigen::VectorXd pi_try = pi + s * delta.segment(Nu, Np);
            const Eigen::VectorXd r_try = sys.momentum_residual(sp, u_try, pi_try);
            const double err_try = dual_norm(sp, r_try);
            if (err_try <= (1.0 - 0.25 * s) * err || err_try <= opts.tolerance * scale) {
                u = u_try;
                pi = pi_try;
                r_u = r_try;
                err = err_try;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) throw StepFailed(step_index, err);
    }
    if (err > opts.tolerance * scale) throw StepFailed(step_index, err);

    if (iterations_out) *iterations_out = iter;
    if (residual_out) *residual_out = err;

    VelocityPressure out;
    out.u = FeFunction{SpaceTag::velocity, u, step_index * tau};
    out.p = FeFunction{SpaceTag::pressure, pi, step_index * tau};
    return out;
}

FeFunction discrete_laplacian(const FeSpacePair& sp, const FeFunction& u) {
    const int S = sp.num_scalar_dofs();
    FeFunction out = sp.zero(SpaceTag::velocity);
    for (int comp = 0; comp < 3; ++comp)
        out.coeff.segment(comp * S, S) = sp.scalar_mass_solver().solve(
            -(sp.scalar_stiffness() * u.coeff.segment(comp * S, S)));
    return out;
}

FeFunction discrete_gradient(const FeSpacePair& sp, const FeFunction& pi) {
    const int S = sp.num_scalar_dofs();
    const Eigen::VectorXd rhs = -(sp.divergence().transpose() * pi.coeff);
    FeFunction out = sp.zero(SpaceTag::velocity);
    for (int comp = 0; comp < 3; ++comp)
        out.coeff.segment(comp * S, S) =
            sp.scalar_mass_solver().solve(rhs.segment(comp * S, S));
    return out;
}

CellField strong_data(const FeSpacePair& sp, const Trajectory& traj, int i) {
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    CellField F(nc, nq);
    if (i == 0) {
        FeFunction rep = discrete_laplacian(sp, traj.nodes[0].u);
        rep.coeff *= traj.nu;
        rep.coeff -= discrete_gradient(sp, traj.nodes[0].pi).coeff;
        F = sample_to_cell_field(sp, rep);
    } else {
        const FeFunction& u = traj.nodes[i].u;
        const FeFunction& u_prev = traj.nodes[i - 1].u;
        const CellField& f = traj.nodes[i].f;
        const double inv_tau = 1.0 / traj.tau;
        parallel_for(nc, [&](int c) {
            for (int q = 0; q < nq; ++q) {
                const VelocitySample s = sample_velocity(sp, u, c, q);
                const Eigen::Vector3d s_prev =
                    sample_velocity(sp, u_prev, c, q).value;
                // (1/2) u.grad u + (1/2) div(u (x) u)
                //   = u.grad u + (1/2)(div u) u  pointwise.
                Eigen::Vector3d v = s.grad.transpose() * s.value +
                                    0.5 * s.grad.trace() * s.value;
                v += inv_tau * (s.value - s_prev);
                if (!f.empty()) v -= f.at(c, q);
                F.at(c, q) = v;
            }
        });
    }
    const Eigen::Vector3d mean = cell_field_mean(sp, F);
    const double tol = 1e-10 * std::max(1.0, cell_field_l2_norm(sp, F));
    if (mean.cwiseAbs().maxCoeff() > tol)
        throw std::runtime_error("strong_data: F^i is not mean-free");
    return F;
}

Trajectory run_time_stepping(const FeSpacePair& sp, const FeFunction& u0,
                             const FeFunction& pi0, const Forcing& forcing,
                             double tau, int n_steps, double nu,
                             const NewtonOptions& opts) {
    Trajectory traj;
    traj.tau = tau;
    traj.nu = nu;
    traj.nodes.reserve(n_steps + 1);

    auto sample_forcing = [&](double t) -> CellField {
        if (forcing.is_zero()) return CellField{};
        return sample_to_cell_field(
            sp, [&](const Eigen::Vector3d& x) { return forcing.fn(t, x); });
    };

    TrajectoryNode node0;
    node0.t = 0.0;
    node0.u = u0;
    node0.pi = pi0;
    node0.f = sample_forcing(0.0);
    traj.nodes.push_back(std::move(node0));
    traj.nodes[0].F = strong_data(sp, traj, 0);

    FeFunction u_prev = u0;
    for (int i = 1; i <= n_steps; ++i) {
        TrajectoryNode node;
        node.t = i * tau;
        node.f = sample_forcing(node.t);
        VelocityPressure vp = step(sp, u_prev, node.f, tau, nu, opts, i,
                                   &node.newton_iterations,
                                   &node.newton_residual);
        node.u = std::move(vp.u);
        node.pi = std::move(vp.p);
        u_prev = node.u;
        traj.nodes.push_back(std::move(node));
        traj.nodes[i].F = strong_data(sp, traj, i);
    }
    return traj;
}

std::string trajectory_to_json(const Trajectory& traj, int mesh_n) {
    nlohmann::json j;
    j["mesh_n"] = mesh_n;
    j["tau"] = traj.tau;
    j["nu"] = traj.nu;
    j["nodes"] = nlohmann::json::array();
    for (const auto& node : traj.nodes) {
        nlohmann::json nj;
        nj["t"] = node.t;
        nj["u"] = std::vector<double>(node.u.coeff.data(),
                                      node.u.coeff.data() + node.u.coeff.size());
        nj["pi"] = std::vector<double>(
            node.pi.coeff.data(), node.pi.coeff.data() + node.pi.coeff.size());
        nj["newton_iterations"] = node.newton_iterations;
        nj["newton_residual"] = node.newton_residual;
        j["nodes"].push_back(std::move(nj));
    }
    return j.dump(1);
}

Trajectory trajectory_from_json(const FeSpacePair& sp, const std::string& text,
                                const Forcing& forcing) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Trajectory traj;
    traj.tau = j.at("tau").get<double>();
    traj.nu = j.at("nu").get<double>();
    if (j.at("mesh_n").get<int>() != sp.mesh().n())
        throw std::invalid_argument(
            "trajectory_from_json: checkpoint mesh does not match");
    for (const auto& nj : j.at("nodes")) {
        TrajectoryNode node;
        node.t = nj.at("t").get<double>();
        const auto uc = nj.at("u").get<std::vector<double>>();
        const auto pc = nj.at("pi").get<std::vector<double>>();
        node.u = FeFunction{SpaceTag::velocity,
                            Eigen::Map<const Eigen::VectorXd>(uc.data(),
                                                              uc.size()),
                            node.t};
        node.pi = FeFunction{SpaceTag::pressure,
                             Eigen::Map<const Eigen::VectorXd>(pc.data(),
                                                               pc.size()),
                             node.t};
        node.newton_iterations = nj.value("newton_iterations", 0);
        node.newton_residual = nj.value("newton_residual", 0.0);
        if (!forcing.is_zero())
            node.f = sample_to_cell_field(sp, [&](const Eigen::Vector3d& x) {
                return forcing.fn(node.t, x);
            });
        traj.nodes.push_back(std::move(node));
    }
    for (int i = 0; i < static_cast<int>(traj.nodes.size()); ++i)
        traj.nodes[i].F = strong_data(sp, traj, i);
    return traj;
}

}  // namespace nsverify

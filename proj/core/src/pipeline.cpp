#include "nsverify/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "nsverify/fields.hpp"

namespace nsverify {

namespace {

struct InitialData {
    VectorField fn;
    GradientField grad;
    bool zero = false;
};

InitialData make_initial_data(const RunConfig& cfg) {
    InitialData data;
    const double a = cfg.initial_data.amplitude;
    if (cfg.initial_data.id == "zero") {
        data.zero = true;
        data.fn = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
        data.grad = [](const Eigen::Vector3d&) { return Eigen::Matrix3d::Zero(); };
    } else if (cfg.initial_data.id == "taylor_green") {
        data.fn = [a](const Eigen::Vector3d& x) {
            return (a * taylor_green(x)).eval();
        };
        data.grad = [a](const Eigen::Vector3d& x) {
            return (a * taylor_green_grad(x)).eval();
        };
    } else {  // custom cosine modes, amplitudes projected solenoidal
        struct Mode {
            Eigen::Vector3d k;
            Eigen::Vector3d amp;
        };
        std::vector<Mode> modes;
        for (const auto& m : cfg.initial_data.modes) {
            Mode mode;
            mode.k = Eigen::Vector3d(m[0], m[1], m[2]);
            Eigen::Vector3d amp(m[3], m[4], m[5]);
            const double k2 = mode.k.squaredNorm();
            if (k2 > 0.0) amp -= mode.k * (mode.k.dot(amp) / k2);
            mode.amp = a * amp;
            modes.push_back(mode);
        }
        data.fn = [modes](const Eigen::Vector3d& x) {
            Eigen::Vector3d v = Eigen::Vector3d::Zero();
            for (const auto& m : modes)
                v += m.amp * std::cos(2.0 * std::numbers::pi * m.k.dot(x));
            return v;
        };
        data.grad = [modes](const Eigen::Vector3d& x) {
            Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
            for (const auto& m : modes) {
                const double s =
                    -2.0 * std::numbers::pi *
                    std::sin(2.0 * std::numbers::pi * m.k.dot(x));
                g += s * m.k * m.amp.transpose();  // g(i,j) = d_i u_j
            }
            return g;
        };
    }
    return data;
}

}  // namespace

Forcing make_forcing(const RunConfig& cfg) {
    Forcing forcing;
    const double a = cfg.forcing.amplitude;
    if (cfg.forcing.mode == "zero") {
        forcing.mode = ForcingMode::zero;
        return forcing;
    }
    if (cfg.forcing.mode == "affine") {
        forcing.mode = ForcingMode::affine;
        if (cfg.forcing.id == "taylor_green") {
            forcing.fn = [a](double, const Eigen::Vector3d& x) {
                return (a * taylor_green(x)).eval();
            };
            return forcing;
        }
        throw ConfigError("unknown affine forcing id: " + cfg.forcing.id);
    }
    forcing.mode = ForcingMode::analytic_sampled;
    if (cfg.forcing.id == "taylor_green_sin") {
        forcing.fn = [a](double t, const Eigen::Vector3d& x) {
            return (a * std::sin(t) * taylor_green(x)).eval();
        };
        return forcing;
    }
    throw ConfigError("unknown analytic forcing id: " + cfg.forcing.id);
}

PipelineResult run_pipeline(const RunConfig& cfg, bool certify_stage) {
    PipelineResult result;
    cfg.validate();

    ConstantsTable constants = default_table();
    for (const auto& [name, value] : cfg.constant_overrides) {
        if (name == "c_e1") constants.c_e1 = value;
        else if (name == "c_e2") constants.c_e2 = value;
        else if (name == "c_Pi1") constants.c_Pi1 = value;
        else if (name == "c_Pi2") constants.c_Pi2 = value;
        else if (name == "c_ell") constants.c_ell = value;
        else if (name == "c_i1") constants.c_i1 = value;
        else if (name == "c_i2") constants.c_i2 = value;
        else if (name == "c_i3") constants.c_i3 = value;
        else if (name == "c_H1") constants.c_H1 = value;
    }
    constants.refresh_derived();
    constants.validate();

    const PeriodicMesh mesh = PeriodicMesh::build(cfg.mesh_n);
    const FeSpacePair space(mesh);
    const InitialData init = make_initial_data(cfg);
    const Forcing forcing = make_forcing(cfg);

    NewtonOptions newton;
    newton.tolerance = cfg.solver.newton_tol;
    newton.max_iterations = cfg.solver.newton_max_iter;

    FeFunction u0 = space.zero(SpaceTag::velocity);
    FeFunction pi0 = space.zero(SpaceTag::pressure);
    InitialDataError e0;
    if (!init.zero) {
        const VelocityPressure proj =
            discrete_stokes_projection(space, init.fn, init.grad);
        u0 = proj.u;
        pi0 = proj.p;
        if (cfg.initial_data.discrete_as_exact) {
            e0.l2 = 0.0;
            e0.l3 = 0.0;
            e0.user_certified = true;
        } else {
            e0.l2 = norm_difference(space, u0, init.fn, NormKind::L2);
            e0.l3 = norm_difference(space, u0, init.fn, NormKind::L3);
        }
    }

    Trajectory traj;
    try {
        traj = run_time_stepping(space, u0, pi0, forcing, cfg.tau,
                                 cfg.n_steps(), cfg.nu, newton);
    } catch (const StepFailed& e) {
        result.exit_code = 1;
        result.failed_step = e.step;
        result.error = e.what();
        return result;
    }

    const EstimateLedger ledger =
        build_ledger(space, traj, constants, forcing, e0);

    if (!cfg.output.trajectory.empty()) {
        std::ofstream out(cfg.output.trajectory);
        out << trajectory_to_json(traj, cfg.mesh_n);
    }
    if (!cfg.output.csv_dir.empty()) {
        std::filesystem::create_directories(cfg.output.csv_dir);
        std::ofstream ledger_csv(cfg.output.csv_dir + "/residual_ledger.csv");
        ledger_csv << ledger_rows_to_csv(ledger.slabs, cfg.tau);
        for (std::size_t i = 0; i < traj.nodes.size(); ++i) {
            CellField negF = traj.nodes[i].F;
            negF *= -1.0;
            const EstimatorBreakdown eb = estimate(
                space, traj.nodes[i].u, traj.nodes[i].pi, negF, cfg.nu,
                constants);
            std::ofstream node_csv(cfg.output.csv_dir + "/estimator_node_" +
                                   std::to_string(i) + ".csv");
            node_csv << eb.to_csv(mesh);
        }
    }

    if (!certify_stage) {
        VerificationReport report;
        report.constants = constants;
        report.mesh_n = cfg.mesh_n;
        report.h = mesh.max_h();
        report.tau = cfg.tau;
        report.nu = cfg.nu;
        report.flags = ledger.flags;
        report.config_hash = cfg.hash();
        result.report = report;
        result.report_json = report.to_json();
        result.exit_code = 0;
    } else {
        VerificationReport report =
            certify(space, traj, ledger, constants, cfg.hash());
        result.report_json = report.to_json();
        const bool certified = report.certified_T.has_value();
        result.report = std::move(report);
        result.exit_code = certified ? 0 : 2;
    }

    if (!cfg.output.report.empty()) {
        std::ofstream out(cfg.output.report);
        out << result.report_json;
    }
    return result;
}

}  // namespace nsverify

// Command-line driver: solve, estimate and certify in one pass, or run the
// scalar blow-up demonstrator.
//
// Exit codes: 0 = certified a horizon > 0, 2 = completed but nothing
// certified, 1 = failure (config error, unsolvable step, ...).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "nsverify/mesh.hpp"
#include "nsverify/ode_verify.hpp"
#include "nsverify/pipeline.hpp"

namespace {

int run_ns(const std::string& config_path, const std::string& out,
           const std::string& csv_dir, bool certify_stage) {
    nsverify::RunConfig cfg;
    try {
        cfg = nsverify::parse_config_file(config_path);
    } catch (const nsverify::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    if (!out.empty()) cfg.output.report = out;
    if (!csv_dir.empty()) cfg.output.csv_dir = csv_dir;
    nsverify::PipelineResult result;
    try {
        result = nsverify::run_pipeline(cfg, certify_stage);
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return 1;
    }
    if (result.exit_code == 1) {
        std::cerr << "pipeline failure";
        if (result.failed_step >= 0)
            std::cerr << " at step " << result.failed_step;
        std::cerr << ": " << result.error << "\n";
        return 1;
    }
    std::cout << result.report_json;
    return result.exit_code;
}

int run_ode(double y0, double tau, int steps, const std::string& out) {
    try {
        const nsverify::OdeTrajectory traj =
            nsverify::euler_solve_available(y0, tau, steps);
        const nsverify::OdeCertificate cert = nsverify::certify(traj);
        const nsverify::OdePrefixReport prefixes =
            nsverify::certify_prefixes(traj);
        const std::string json =
            nsverify::certificate_json(traj, cert, prefixes.certified_T);
        std::cout << json;
        if (!out.empty()) {
            std::ofstream f(out);
            f << json;
        }
        return prefixes.certified_T > 0.0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "verify-ode failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"a posteriori existence verification for periodic "
                 "incompressible flow"};
    app.require_subcommand(1);

    std::string config_path, out_path, csv_dir;
    auto* ns = app.add_subcommand("verify-ns",
                                  "solve, estimate and certify a run");
    ns->add_option("--config", config_path, "config file (JSON or key=value)")
        ->required();
    ns->add_option("--out", out_path, "report JSON path");
    ns->add_option("--csv", csv_dir, "directory for CSV exports");

    auto* est = app.add_subcommand("estimate-only",
                                   "solve and build ledgers, skip certification");
    std::string est_config, est_out, est_csv;
    est->add_option("--config", est_config, "config file")->required();
    est->add_option("--out", est_out, "report JSON path");
    est->add_option("--csv", est_csv, "directory for CSV exports");

    double y0 = 0.1, tau = 0.01;
    int steps = 50;
    std::string ode_out;
    auto* ode = app.add_subcommand("verify-ode",
                                   "scalar blow-up demonstrator certificate");
    ode->add_option("--y0", y0, "initial value (>= 0)")->required();
    ode->add_option("--tau", tau, "step size")->required();
    ode->add_option("--steps", steps, "number of steps")->required();
    ode->add_option("--out", ode_out, "certificate JSON path");

    int mesh_n = 2;
    std::string mesh_out;
    auto* dump = app.add_subcommand("dump-mesh", "mesh debug dump (JSON)");
    dump->add_option("--n", mesh_n, "subdivisions per axis")->required();
    dump->add_option("--out", mesh_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (ns->parsed()) return run_ns(config_path, out_path, csv_dir, true);
    if (est->parsed()) return run_ns(est_config, est_out, est_csv, false);
    if (ode->parsed()) return run_ode(y0, tau, steps, ode_out);
    if (dump->parsed()) {
        try {
            const auto mesh = nsverify::PeriodicMesh::build(mesh_n);
            const std::string json = mesh.dump_json();
            if (mesh_out.empty()) {
                std::cout << json;
            } else {
                std::ofstream f(mesh_out);
                f << json;
            }
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "dump-mesh failed: " << e.what() << "\n";
            return 1;
        }
    }
    return 1;
}

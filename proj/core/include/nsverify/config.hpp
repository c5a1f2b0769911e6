#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsverify {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Run configuration. Accepted on disk either as JSON or as dotted key-value
/// lines ("mesh.n = 4", '#' comments).
struct RunConfig {
    int mesh_n = 4;
    double tau = 0.05;
    double T_final = 0.2;
    double nu = 1.0;

    struct InitialData {
        std::string id = "taylor_green";  // taylor_green | zero | custom
        double amplitude = 1.0;
        bool discrete_as_exact = false;  // treat u_h^0 as the exact datum
        // custom: cosine modes (kx,ky,kz,ax,ay,az), projected solenoidal
        std::vector<std::array<double, 6>> modes;
    } initial_data;

    struct ForcingConfig {
        std::string mode = "zero";  // zero | affine | analytic-sampled
        std::string id;             // taylor_green | taylor_green_sin
        double amplitude = 0.0;
    } forcing;

    std::map<std::string, double> constant_overrides;

    struct Solver {
        double newton_tol = 1e-10;
        int newton_max_iter = 25;
        std::string linear_solver = "sparse_lu";
    } solver;

    struct Output {
        std::string report;      // report JSON path ("" = stdout only)
        std::string csv_dir;     // per-module CSV exports
        std::string trajectory;  // checkpoint path
    } output;

    int n_steps() const;
    void validate() const;
    /// Canonical serialisation used for hashing; field order is fixed.
    std::string canonical() const;
    std::string hash() const;  // FNV-1a over canonical()
};

RunConfig parse_config_text(const std::string& text,
                            const std::string& source_name);
RunConfig parse_config_file(const std::string& path);

}  // namespace nsverify

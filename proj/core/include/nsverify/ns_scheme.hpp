#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsverify/fem.hpp"

namespace nsverify {

/// Newton failed to reach tolerance; the step size is too large for the
/// current data. Callers may halve tau and restart the run.
struct StepFailed : std::runtime_error {
    int step;
    double residual;
    StepFailed(int step_, double residual_)
        : std::runtime_error("implicit Euler step " + std::to_string(step_) +
                             " failed: Newton residual " +
                             std::to_string(residual_)),
          step(step_),
          residual(residual_) {}
};

enum class ForcingMode { zero, affine, analytic_sampled };

/// Right-hand side data. `fn` is sampled pointwise in time at the grid nodes.
/// Mode `affine` declares that f is exactly affine in t on every slab, which
/// makes the forcing-interpolation residual term vanish identically; mode
/// `analytic_sampled` downgrades that term to a sampled, non-rigorous bound.
struct Forcing {
    ForcingMode mode = ForcingMode::zero;
    std::function<Eigen::Vector3d(double, const Eigen::Vector3d&)> fn;

    bool is_zero() const { return mode == ForcingMode::zero; }
};

struct NewtonOptions {
    double tolerance = 1e-10;  // dual-norm residual, relative to data scale
    int max_iterations = 25;
    int max_halvings = 8;
};

struct TrajectoryNode {
    double t = 0.0;
    FeFunction u;
    FeFunction pi;
    CellField f;        // forcing sample at t (empty for zero forcing)
    CellField F;        // strong data of the auxiliary Stokes problem
    int newton_iterations = 0;
    double newton_residual = 0.0;
};

struct Trajectory {
    double tau = 0.0;
    double nu = 0.0;
    std::vector<TrajectoryNode> nodes;

    int num_slabs() const { return static_cast<int>(nodes.size()) - 1; }
};

/// One implicit Euler step of the discrete system
///   <d_tau u, v> + btilde(u,u,v) + nu <grad u, grad v> - <pi, div v> = <f, v>,
///   <div u, q> = 0, <pi, 1> = 0.
VelocityPressure step(const FeSpacePair& sp, const FeFunction& u_prev,
                      const CellField& f_i, double tau, double nu,
                      const NewtonOptions& opts, int step_index,
                      int* iterations_out = nullptr,
                      double* residual_out = nullptr);

/// Riesz representative in V_h of v -> -<grad u, grad v>.
FeFunction discrete_laplacian(const FeSpacePair& sp, const FeFunction& u);
/// Riesz representative in V_h of v -> -<pi, div v>.
FeFunction discrete_gradient(const FeSpacePair& sp, const FeFunction& pi);

/// Strong data F^i of the auxiliary Stokes problem at node i:
///   i >= 1:  (1/2) u.grad u + (1/2) div(u (x) u) + d_tau u^i - f^i,
///   i == 0:  nu Lap_h u^0 - grad_h pi^0.
/// The result is mean-free (checked, tolerance 1e-10 relative).
CellField strong_data(const FeSpacePair& sp, const Trajectory& traj, int i);

/// Runs the scheme from discrete initial data over n_steps uniform steps.
Trajectory run_time_stepping(const FeSpacePair& sp, const FeFunction& u0,
                             const FeFunction& pi0, const Forcing& forcing,
                             double tau, int n_steps, double nu,
                             const NewtonOptions& opts = {});

/// Checkpoint: discrete coefficients and grid metadata. Data functions are not
/// serialised; reloading recomputes f and F from the forcing in the config.
std::string trajectory_to_json(const Trajectory& traj, int mesh_n);
Trajectory trajectory_from_json(const FeSpacePair& sp, const std::string& text,
                                const Forcing& forcing);

}  // namespace nsverify

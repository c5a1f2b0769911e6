#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>
#include <vector>

#include "nsverify/mesh.hpp"
#include "nsverify/quadrature.hpp"

namespace nsverify {

using SparseMat = Eigen::SparseMatrix<double>;
using VectorField = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;
/// Gradient convention: G(i,j) = d_i u_j.
using GradientField = std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>;

enum class SpaceTag { velocity, pressure };
enum class NormKind { L2, L3, L6, W12 };

/// Coefficient representation of a velocity (vector P2) or pressure (scalar
/// P1) field. Velocity dofs are component-blocked: dof(c,s) = c*S + s.
struct FeFunction {
    SpaceTag tag = SpaceTag::velocity;
    Eigen::VectorXd coeff;
    double time = 0.0;
};

/// Values of a vector field at every cell quadrature point; the common
/// currency for data terms that are only ever integrated.
class CellField {
  public:
    CellField() = default;
    CellField(int num_cells, int points_per_cell)
        : nq_(points_per_cell),
          data_(static_cast<std::size_t>(num_cells) * points_per_cell,
                Eigen::Vector3d::Zero()) {}

    Eigen::Vector3d& at(int cell, int q) { return data_[cell * nq_ + q]; }
    const Eigen::Vector3d& at(int cell, int q) const {
        return data_[cell * nq_ + q];
    }
    int points_per_cell() const { return nq_; }
    int num_cells() const {
        return nq_ ? static_cast<int>(data_.size()) / nq_ : 0;
    }
    bool empty() const { return data_.empty(); }

    CellField& operator+=(const CellField& o);
    CellField& operator-=(const CellField& o);
    CellField& operator*=(double s);
    friend CellField operator-(CellField a, const CellField& b) {
        a -= b;
        return a;
    }

  private:
    int nq_ = 0;
    std::vector<Eigen::Vector3d> data_;
};

/// P2 shape values/gradients on the reference tetrahedron. Local node order:
/// 4 vertices then 6 edge midpoints in PeriodicMesh::kEdgeVertices order.
void p2_basis(const Eigen::Vector3d& ref, double values[10]);
void p2_basis_grad(const Eigen::Vector3d& ref, Eigen::Vector3d grads[10]);
/// Reference Hessians are constant for quadratics.
void p2_basis_hessian(Eigen::Matrix3d hessians[10]);
void p1_basis(const Eigen::Vector3d& ref, double values[4]);

/// Taylor-Hood pair on the periodic mesh: continuous vector P2 velocity and
/// continuous P1 pressure with a mean-zero constraint handled by a Lagrange
/// multiplier in every solve.
class FeSpacePair {
  public:
    explicit FeSpacePair(const PeriodicMesh& mesh, int quadrature_order = 6);

    const PeriodicMesh& mesh() const { return *mesh_; }

    int num_scalar_dofs() const { return n_scalar_; }
    int num_velocity_dofs() const { return 3 * n_scalar_; }
    int num_pressure_dofs() const { return n_pressure_; }

    int p2_dof(int cell, int local) const { return p2_dofs_[cell][local]; }
    int p1_dof(int cell, int local) const {
        return mesh_->cell(cell).vertex[local];
    }
    int velocity_dof(int comp, int scalar) const {
        return comp * n_scalar_ + scalar;
    }

    const TetQuadrature& cell_rule() const { return cell_rule_; }
    const TriQuadrature& face_rule() const { return face_rule_; }

    /// Physical quadrature point q of a cell.
    Eigen::Vector3d cell_point(int cell, int q) const;
    /// Quadrature weight including the Jacobian factor.
    double cell_weight(int cell, int q) const {
        return cell_rule_.weights[q] * mesh_->cell(cell).det_jacobian;
    }

    // Reference basis tables at the cell-rule points.
    double p2_value(int q, int local) const { return p2_val_[q][local]; }
    const Eigen::Vector3d& p2_ref_grad(int q, int local) const {
        return p2_grad_[q][local];
    }
    double p1_value(int q, int local) const { return p1_val_[q][local]; }

    // Assembled operators (built once, cached).
    const SparseMat& scalar_mass() const;
    const SparseMat& scalar_stiffness() const;
    /// Divergence block: (D u)_q = <div u, psi_q>, size Np x 3S.
    const SparseMat& divergence() const;
    /// e_q = <psi_q, 1>.
    const Eigen::VectorXd& pressure_mean_vector() const;
    /// g_s = <phi_s, 1> for the scalar P2 basis.
    const Eigen::VectorXd& scalar_mean_vector() const;

    const Eigen::SimplicialLDLT<SparseMat>& scalar_mass_solver() const;

    FeFunction zero(SpaceTag tag) const;

  private:
    void build_operators() const;

    const PeriodicMesh* mesh_;
    int n_scalar_ = 0;
    int n_pressure_ = 0;
    std::vector<std::array<int, 10>> p2_dofs_;
    TetQuadrature cell_rule_;
    TriQuadrature face_rule_;
    std::vector<std::array<double, 10>> p2_val_;
    std::vector<std::array<Eigen::Vector3d, 10>> p2_grad_;
    std::vector<std::array<double, 4>> p1_val_;

    mutable bool built_ = false;
    mutable SparseMat mass_, stiffness_, divergence_;
    mutable Eigen::VectorXd pressure_mean_, scalar_mean_;
    mutable std::unique_ptr<Eigen::SimplicialLDLT<SparseMat>> mass_solver_;
};

/// Velocity value and gradient at one point; grad(i,j) = d_i u_j.
struct VelocitySample {
    Eigen::Vector3d value;
    Eigen::Matrix3d grad;
};

VelocitySample sample_velocity(const FeSpacePair& sp, const FeFunction& u,
                               int cell, int q);
VelocitySample sample_velocity_at(const FeSpacePair& sp, const FeFunction& u,
                                  int cell, const Eigen::Vector3d& ref);
double sample_pressure(const FeSpacePair& sp, const FeFunction& p, int cell,
                       int q);
/// Evaluate a velocity FeFunction at an arbitrary point of the torus.
Eigen::Vector3d evaluate_velocity(const FeSpacePair& sp, const FeFunction& u,
                                  const Eigen::Vector3d& x);

/// Cellwise-constant Laplacian of a P2 velocity on one cell.
Eigen::Vector3d cell_laplacian(const FeSpacePair& sp, const FeFunction& u,
                               int cell);
/// Cellwise-constant gradient of a P1 pressure on one cell.
Eigen::Vector3d cell_pressure_gradient(const FeSpacePair& sp,
                                       const FeFunction& p, int cell);

CellField sample_to_cell_field(const FeSpacePair& sp, const FeFunction& u);
CellField sample_to_cell_field(const FeSpacePair& sp, const VectorField& f);
Eigen::Vector3d cell_field_mean(const FeSpacePair& sp, const CellField& f);
double cell_field_l2_norm(const FeSpacePair& sp, const CellField& f);
/// <f, phi_v> for all velocity test functions, via the cell rule.
Eigen::VectorXd cell_field_load_vector(const FeSpacePair& sp,
                                       const CellField& f);

/// Norms of finite element functions. L2 and W12 use quadrature that is exact
/// for the polynomial integrand; L3/L6 are fixed-rule approximations of a
/// non-polynomial integrand and callers must carry the matching rigor flag.
double norm(const FeSpacePair& sp, const FeFunction& f, NormKind kind);
/// || f - g ||, g analytic, same quadrature caveat.
double norm_difference(const FeSpacePair& sp, const FeFunction& f,
                       const VectorField& g, NormKind kind);

/// b(u,v,w) = -<u (x) v, grad w>.
double trilinear(const FeSpacePair& sp, const FeFunction& u,
                 const FeFunction& v, const FeFunction& w);
/// Skew-symmetrised convective form 0.5*(b(u,v,w) - b(u,w,v)).
double trilinear_skew(const FeSpacePair& sp, const FeFunction& u,
                      const FeFunction& v, const FeFunction& w);
/// r_v = btilde(u,u,phi_v) for every velocity test function.
Eigen::VectorXd convection_residual(const FeSpacePair& sp,
                                    const FeFunction& u);
/// Derivative of convection_residual at u.
SparseMat convection_jacobian(const FeSpacePair& sp, const FeFunction& u);

FeFunction l2_project(const FeSpacePair& sp, const VectorField& f);
FeFunction l2_project_pressure(const FeSpacePair& sp,
                               const std::function<double(const Eigen::Vector3d&)>& f);

struct VelocityPressure {
    FeFunction u;
    FeFunction p;
};

/// Galerkin solution of the constrained Stokes system
///   nu <grad U, grad v> - <P, div v> = rhs(v),  <div U, q> = 0,
///   <U_k, 1> = mean_k,  <P, 1> = 0.
/// rhs is given as a load vector over velocity dofs.
VelocityPressure stokes_solve(const FeSpacePair& sp, double nu,
                              const Eigen::VectorXd& rhs,
                              const Eigen::Vector3d& mean);

/// Projection onto the discretely divergence-free velocity space with matching
/// component means; the pressure component is the projection of zero.
VelocityPressure discrete_stokes_projection(const FeSpacePair& sp,
                                            const VectorField& u0,
                                            const GradientField& grad_u0);

/// max_q |<div u, psi_q>| -- discrete divergence residual.
double discrete_divergence_residual(const FeSpacePair& sp,
                                    const FeFunction& u);

}  // namespace nsverify

#include "nsverify/fem.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

#include "nsverify/parallel.hpp"

namespace nsverify {

CellField& CellField::operator+=(const CellField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}
CellField& CellField::operator-=(const CellField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}
CellField& CellField::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

namespace {
const Eigen::Vector3d kGradLambda[4] = {
    Eigen::Vector3d(-1, -1, -1), Eigen::Vector3d(1, 0, 0),
    Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1)};
}  // namespace

void p2_basis(const Eigen::Vector3d& r, double values[10]) {
    const double l[4] = {1.0 - r[0] - r[1] - r[2], r[0], r[1], r[2]};
    for (int v = 0; v < 4; ++v) values[v] = l[v] * (2.0 * l[v] - 1.0);
    for (int e = 0; e < 6; ++e) {
        const auto& ev = PeriodicMesh::kEdgeVertices[e];
        values[4 + e] = 4.0 * l[ev[0]] * l[ev[1]];
    }
}

void p2_basis_grad(const Eigen::Vector3d& r, Eigen::Vector3d grads[10]) {
    const double l[4] = {1.0 - r[0] - r[1] - r[2], r[0], r[1], r[2]};
    for (int v = 0; v < 4; ++v) grads[v] = (4.0 * l[v] - 1.0) * kGradLambda[v];
    for (int e = 0; e < 6; ++e) {
        const auto& ev = PeriodicMesh::kEdgeVertices[e];
        grads[4 + e] =
            4.0 * (l[ev[0]] * kGradLambda[ev[1]] + l[ev[1]] * kGradLambda[ev[0]]);
    }
}

void p2_basis_hessian(Eigen::Matrix3d hessians[10]) {
    for (int v = 0; v < 4; ++v)
        hessians[v] = 4.0 * kGradLambda[v] * kGradLambda[v].transpose();
    for (int e = 0; e < 6; ++e) {
        const auto& ev = PeriodicMesh::kEdgeVertices[e];
        hessians[4 + e] =
            4.0 * (kGradLambda[ev[0]] * kGradLambda[ev[1]].transpose() +
                   kGradLambda[ev[1]] * kGradLambda[ev[0]].transpose());
    }
}

void p1_basis(const Eigen::Vector3d& r, double values[4]) {
    values[0] = 1.0 - r[0] - r[1] - r[2];
    values[1] = r[0];
    values[2] = r[1];
    values[3] = r[2];
}

FeSpacePair::FeSpacePair(const PeriodicMesh& mesh, int quadrature_order)
    : mesh_(&mesh),
      cell_rule_(make_tet_quadrature(quadrature_order)),
      face_rule_(make_triangle_quadrature(4)) {
    const int nv = mesh.num_vertices();
    n_scalar_ = nv + mesh.num_edges();
    n_pressure_ = nv;
    p2_dofs_.resize(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& cell = mesh.cell(c);
        for (int v = 0; v < 4; ++v) p2_dofs_[c][v] = cell.vertex[v];
        for (int e = 0; e < 6; ++e) p2_dofs_[c][4 + e] = nv + cell.edge[e];
    }
    const int nq = cell_rule_.size();
    p2_val_.resize(nq);
    p2_grad_.resize(nq);
    p1_val_.resize(nq);
    for (int q = 0; q < nq; ++q) {
        p2_basis(cell_rule_.points[q], p2_val_[q].data());
        p2_basis_grad(cell_rule_.points[q], p2_grad_[q].data());
        p1_basis(cell_rule_.points[q], p1_val_[q].data());
    }
}

Eigen::Vector3d FeSpacePair::cell_point(int cell, int q) const {
    const auto& c = mesh_->cell(cell);
    return c.x[0] + c.jacobian * cell_rule_.points[q];
}

void FeSpacePair::build_operators() const {
    if (built_) return;
    const int nc = mesh_->num_cells();
    const int nq = cell_rule_.size();

    struct LocalBlock {
        Eigen::Matrix<double, 10, 10> mass, stiffness;
        Eigen::Matrix<double, 4, 30> divergence;  // rows P1, cols (comp,s)
    };
    std::vector<LocalBlock> local(nc);

    parallel_for(nc, [&](int c) {
        const auto& cell = mesh_->cell(c);
        LocalBlock& L = local[c];
        L.mass.setZero();
        L.stiffness.setZero();
        L.divergence.setZero();
        Eigen::Vector3d g[10];
        for (int q = 0; q < nq; ++q) {
            const double w = cell_rule_.weights[q] * cell.det_jacobian;
            for (int a = 0; a < 10; ++a)
                g[a] = cell.jacobian_inv_t * p2_grad_[q][a];
            for (int a = 0; a < 10; ++a) {
                for (int b = 0; b < 10; ++b) {
                    L.mass(a, b) += w * p2_val_[q][a] * p2_val_[q][b];
                    L.stiffness(a, b) += w * g[a].dot(g[b]);
                }
            }
            for (int p = 0; p < 4; ++p)
                for (int comp = 0; comp < 3; ++comp)
                    for (int s = 0; s < 10; ++s)
                        L.divergence(p, comp * 10 + s) +=
                            w * p1_val_[q][p] * g[s][comp];
        }
    });

    std::vector<Eigen::Triplet<double>> tm, tk, td;
    tm.reserve(static_cast<std::size_t>(nc) * 100);
    tk.reserve(static_cast<std::size_t>(nc) * 100);
    td.reserve(static_cast<std::size_t>(nc) * 120);
    for (int c = 0; c < nc; ++c) {
        const auto& dofs = p2_dofs_[c];
        for (int a = 0; a < 10; ++a)
            for (int b = 0; b < 10; ++b) {
                tm.emplace_back(dofs[a], dofs[b], local[c].mass(a, b));
                tk.emplace_back(dofs[a], dofs[b], local[c].stiffness(a, b));
            }
        for (int p = 0; p < 4; ++p) {
            const int row = p1_dof(c, p);
            for (int comp = 0; comp < 3; ++comp)
                for (int s = 0; s < 10; ++s)
                    td.emplace_back(row, velocity_dof(comp, dofs[s]),
                                    local[c].divergence(p, comp * 10 + s));
        }
    }
    mass_.resize(n_scalar_, n_scalar_);
    mass_.setFromTriplets(tm.begin(), tm.end());
    stiffness_.resize(n_scalar_, n_scalar_);
    stiffness_.setFromTriplets(tk.begin(), tk.end());
    divergence_.resize(n_pressure_, 3 * n_scalar_);
    divergence_.setFromTriplets(td.begin(), td.end());

    pressure_mean_ = Eigen::VectorXd::Zero(n_pressure_);
    scalar_mean_ = Eigen::VectorXd::Zero(n_scalar_);
    for (int c = 0; c < nc; ++c) {
        const auto& cell = mesh_->cell(c);
        for (int q = 0; q < nq; ++q) {
            const double w = cell_rule_.weights[q] * cell.det_jacobian;
            for (int p = 0; p < 4; ++p)
                pressure_mean_[p1_dof(c, p)] += w * p1_val_[q][p];
            for (int s = 0; s < 10; ++s)
                scalar_mean_[p2_dofs_[c][s]] += w * p2_val_[q][s];
        }
    }

    mass_solver_ = std::make_unique<Eigen::SimplicialLDLT<SparseMat>>();
    mass_solver_->compute(mass_);
    if (mass_solver_->info() != Eigen::Success)
        throw std::runtime_error("FeSpacePair: mass factorisation failed");
    built_ = true;
}

const SparseMat& FeSpacePair::scalar_mass() const {
    build_operators();
    return mass_;
}
const SparseMat& FeSpacePair::scalar_stiffness() const {
    build_operators();
    return stiffness_;
}
const SparseMat& FeSpacePair::divergence() const {
    build_operators();
    return divergence_;
}
const Eigen::VectorXd& FeSpacePair::pressure_mean_vector() const {
    build_operators();
    return pressure_mean_;
}
const Eigen::VectorXd& FeSpacePair::scalar_mean_vector() const {
    build_operators();
    return scalar_mean_;
}
const Eigen::SimplicialLDLT<SparseMat>& FeSpacePair::scalar_mass_solver()
    const {
    build_operators();
    return *mass_solver_;
}

FeFunction FeSpacePair::zero(SpaceTag tag) const {
    FeFunction f;
    f.tag = tag;
    f.coeff = Eigen::VectorXd::Zero(tag == SpaceTag::velocity
                                        ? num_velocity_dofs()
                                        : num_pressure_dofs());
    return f;
}

VelocitySample sample_velocity(const FeSpacePair& sp, const FeFunction& u,
                               int cell, int q) {
    const auto& mcell = sp.mesh().cell(cell);
    VelocitySample out;
    out.value.setZero();
    out.grad.setZero();
    for (int s = 0; s < 10; ++s) {
        const int dof = sp.p2_dof(cell, s);
        const double val = sp.p2_value(q, s);
        const Eigen::Vector3d g = mcell.jacobian_inv_t * sp.p2_ref_grad(q, s);
        for (int comp = 0; comp < 3; ++comp) {
            const double c = u.coeff[sp.velocity_dof(comp, dof)];
            out.value[comp] += c * val;
            out.grad.col(comp) += c * g;  // grad(i,comp) = d_i u_comp
        }
    }
    return out;
}

VelocitySample sample_velocity_at(const FeSpacePair& sp, const FeFunction& u,
                                  int cell, const Eigen::Vector3d& ref) {
    const auto& mcell = sp.mesh().cell(cell);
    double val[10];
    Eigen::Vector3d gref[10];
    p2_basis(ref, val);
    p2_basis_grad(ref, gref);
    VelocitySample out;
    out.value.setZero();
    out.grad.setZero();
    for (int s = 0; s < 10; ++s) {
        const int dof = sp.p2_dof(cell, s);
        const Eigen::Vector3d g = mcell.jacobian_inv_t * gref[s];
        for (int comp = 0; comp < 3; ++comp) {
            const double c = u.coeff[sp.velocity_dof(comp, dof)];
            out.value[comp] += c * val[s];
            out.grad.col(comp) += c * g;
        }
    }
    return out;
}

double sample_pressure(const FeSpacePair& sp, const FeFunction& p, int cell,
                       int q) {
    double out = 0.0;
    for (int s = 0; s < 4; ++s)
        out += p.coeff[sp.p1_dof(cell, s)] * sp.p1_value(q, s);
    return out;
}

Eigen::Vector3d evaluate_velocity(const FeSpacePair& sp, const FeFunction& u,
                                  const Eigen::Vector3d& x) {
    const auto loc = sp.mesh().locate(x);
    return sample_velocity_at(sp, u, loc.cell, loc.ref).value;
}

Eigen::Vector3d cell_laplacian(const FeSpacePair& sp, const FeFunction& u,
                               int cell) {
    const auto& mcell = sp.mesh().cell(cell);
    Eigen::Matrix3d href[10];
    p2_basis_hessian(href);
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (int s = 0; s < 10; ++s) {
        const Eigen::Matrix3d hphys = mcell.jacobian_inv_t * href[s] *
                                      mcell.jacobian_inv_t.transpose();
        const double lap = hphys.trace();
        const int dof = sp.p2_dof(cell, s);
        for (int comp = 0; comp < 3; ++comp)
            out[comp] += u.coeff[sp.velocity_dof(comp, dof)] * lap;
    }
    return out;
}

Eigen::Vector3d cell_pressure_gradient(const FeSpacePair& sp,
                                       const FeFunction& p, int cell) {
    const auto& mcell = sp.mesh().cell(cell);
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (int s = 0; s < 4; ++s)
        out += p.coeff[sp.p1_dof(cell, s)] *
               (mcell.jacobian_inv_t * kGradLambda[s]);
    return out;
}

CellField sample_to_cell_field(const FeSpacePair& sp, const FeFunction& u) {
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    CellField f(nc, nq);
    parallel_for(nc, [&](int c) {
        for (int q = 0; q < nq; ++q)
            f.at(c, q) = sample_velocity(sp, u, c, q).value;
    });
    return f;
}

CellField sample_to_cell_field(const FeSpacePair& sp, const VectorField& fn) {
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    CellField f(nc, nq);
    parallel_for(nc, [&](int c) {
        for (int q = 0; q < nq; ++q) f.at(c, q) = fn(sp.cell_point(c, q));
    });
    return f;
}

Eigen::Vector3d cell_field_mean(const FeSpacePair& sp, const CellField& f) {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (int c = 0; c < sp.mesh().num_cells(); ++c)
        for (int q = 0; q < sp.cell_rule().size(); ++q)
            m += sp.cell_weight(c, q) * f.at(c, q);
    return m;  // domain volume is 1
}

double cell_field_l2_norm(const FeSpacePair& sp, const CellField& f) {
    double s = 0.0;
    for (int c = 0; c < sp.mesh().num_cells(); ++c)
        for (int q = 0; q < sp.cell_rule().size(); ++q)
            s += sp.cell_weight(c, q) * f.at(c, q).squaredNorm();
    return std::sqrt(s);
}

Eigen::VectorXd cell_field_load_vector(const FeSpacePair& sp,
                                       const CellField& f) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(sp.num_velocity_dofs());
    for (int c = 0; c < sp.mesh().num_cells(); ++c) {
        for (int q = 0; q < sp.cell_rule().size(); ++q) {
            const double w = sp.cell_weight(c, q);
            const Eigen::Vector3d& v = f.at(c, q);
            for (int s = 0; s < 10; ++s) {
                const double nv = w * sp.p2_value(q, s);
                const int dof = sp.p2_dof(c, s);
                for (int comp = 0; comp < 3; ++comp)
                    load[sp.velocity_dof(comp, dof)] += nv * v[comp];
            }
        }
    }
    return load;
}

namespace {

double lp_exponent(NormKind kind) {
    switch (kind) {
        case NormKind::L2: return 2.0;
        case NormKind::L3: return 3.0;
        case NormKind::L6: return 6.0;
        default: throw std::invalid_argument("lp_exponent: not an Lp norm");
    }
}

}  // namespace

double norm(const FeSpacePair& sp, const FeFunction& f, NormKind kind) {
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    std::vector<double> partial(nc, 0.0);
    if (f.tag == SpaceTag::velocity) {
        parallel_for(nc, [&](int c) {
            double acc = 0.0;
            for (int q = 0; q < nq; ++q) {
                const double w = sp.cell_weight(c, q);
                const VelocitySample s = sample_velocity(sp, f, c, q);
                if (kind == NormKind::W12)
                    acc += w * (s.value.squaredNorm() + s.grad.squaredNorm());
                else
                    acc += w * std::pow(s.value.squaredNorm(),
                                        0.5 * lp_exponent(kind));
            }
            partial[c] = acc;
        });
    } else {
        parallel_for(nc, [&](int c) {
            double acc = 0.0;
            const auto& mcell = sp.mesh().cell(c);
            const Eigen::Vector3d gp = cell_pressure_gradient(sp, f, c);
            for (int q = 0; q < nq; ++q) {
                const double w = sp.cell_weight(c, q);
                const double v = sample_pressure(sp, f, c, q);
                if (kind == NormKind::W12)
                    acc += w * (v * v + gp.squaredNorm());
                else
                    acc += w * std::pow(v * v, 0.5 * lp_exponent(kind));
            }
            (void)mcell;
            partial[c] = acc;
        });
    }
    double total = 0.0;
    for (double p : partial) total += p;
    const double inv_p = kind == NormKind::W12 ? 0.5 : 1.0 / lp_exponent(kind);
    return std::pow(total, inv_p);
}

double norm_difference(const FeSpacePair& sp, const FeFunction& f,
                       const VectorField& g, NormKind kind) {
    if (f.tag != SpaceTag::velocity)
        throw std::invalid_argument("norm_difference: velocity fields only");
    if (kind == NormKind::W12)
        throw std::invalid_argument(
            "norm_difference: W12 needs the analytic gradient; not provided");
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    std::vector<double> partial(nc, 0.0);
    const double p = lp_exponent(kind);
    parallel_for(nc, [&](int c) {
        double acc = 0.0;
        for (int q = 0; q < nq; ++q) {
            const double w = sp.cell_weight(c, q);
            const Eigen::Vector3d d =
                sample_velocity(sp, f, c, q).value - g(sp.cell_point(c, q));
            acc += w * std::pow(d.squaredNorm(), 0.5 * p);
        }
        partial[c] = acc;
    });
    double total = 0.0;
    for (double v : partial) total += v;
    return std::pow(total, 1.0 / p);
}

double trilinear(const FeSpacePair& sp, const FeFunction& u,
                 const FeFunction& v, const FeFunction& w) {
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    std::vector<double> partial(nc, 0.0);
    parallel_for(nc, [&](int c) {
        double acc = 0.0;
        for (int q = 0; q < nq; ++q) {
            const double wq = sp.cell_weight(c, q);
            const Eigen::Vector3d uv = sample_velocity(sp, u, c, q).value;
            const Eigen::Vector3d vv = sample_velocity(sp, v, c, q).value;
            const Eigen::Matrix3d gw = sample_velocity(sp, w, c, q).grad;
            // -<u (x) v, grad w> with grad(i,j) = d_i w_j
            acc -= wq * uv.dot(gw * vv);  // sum_ij u_i v_j d_i w_j
        }
        partial[c] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double trilinear_skew(const FeSpacePair& sp, const FeFunction& u,
                      const FeFunction& v, const FeFunction& w) {
    return 0.5 * (trilinear(sp, u, v, w) - trilinear(sp, u, w, v));
}

Eigen::VectorXd convection_residual(const FeSpacePair& sp,
                                    const FeFunction& u) {
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    std::vector<Eigen::Matrix<double, 30, 1>> local(
        nc, Eigen::Matrix<double, 30, 1>::Zero());
    parallel_for(nc, [&](int c) {
        const auto& mcell = sp.mesh().cell(c);
        Eigen::Vector3d g[10];
        for (int q = 0; q < nq; ++q) {
            const double w = sp.cell_weight(c, q);
            for (int s = 0; s < 10; ++s)
                g[s] = mcell.jacobian_inv_t * sp.p2_ref_grad(q, s);
            const VelocitySample su = sample_velocity(sp, u, c, q);
            const Eigen::Vector3d conv =
                su.grad.transpose() * su.value;  // (u . grad) u
            for (int s = 0; s < 10; ++s) {
                const double ug = su.value.dot(g[s]);
                const double nv = sp.p2_value(q, s);
                for (int comp = 0; comp < 3; ++comp)
                    local[c](comp * 10 + s) +=
                        0.5 * w * (nv * conv[comp] - su.value[comp] * ug);
            }
        }
    });
    Eigen::VectorXd r = Eigen::VectorXd::Zero(sp.num_velocity_dofs());
    for (int c = 0; c < nc; ++c)
        for (int s = 0; s < 10; ++s)
            for (int comp = 0; comp < 3; ++comp)
                r[sp.velocity_dof(comp, sp.p2_dof(c, s))] +=
                    local[c](comp * 10 + s);
    return r;
}

SparseMat convection_jacobian(const FeSpacePair& sp, const FeFunction& u) {
    const int nc = sp.mesh().num_cells();
    const int nq = sp.cell_rule().size();
    std::vector<Eigen::Matrix<double, 30, 30>> local(
        nc, Eigen::Matrix<double, 30, 30>::Zero());
    parallel_for(nc, [&](int c) {
        const auto& mcell = sp.mesh().cell(c);
        Eigen::Vector3d g[10];
        double ug[10];
        for (int q = 0; q < nq; ++q) {
            const double w2 = 0.5 * sp.cell_weight(c, q);
            for (int s = 0; s < 10; ++s) {
                g[s] = mcell.jacobian_inv_t * sp.p2_ref_grad(q, s);
            }
            const VelocitySample su = sample_velocity(sp, u, c, q);
            for (int s = 0; s < 10; ++s) ug[s] = su.value.dot(g[s]);
            for (int st = 0; st < 10; ++st) {
                const double nt = sp.p2_value(q, st);
                for (int su_ = 0; su_ < 10; ++su_) {
                    const double nu_ = sp.p2_value(q, su_);
                    const double diag = w2 * (-nu_ * ug[st] + nt * ug[su_]);
                    for (int jt = 0; jt < 3; ++jt)
                        for (int ju = 0; ju < 3; ++ju) {
                            double val =
                                w2 * (-nu_ * su.value[jt] * g[st][ju] +
                                      nu_ * nt * su.grad(ju, jt));
                            if (jt == ju) val += diag;
                            local[c](jt * 10 + st, ju * 10 + su_) += val;
                        }
                }
            }
        }
    });
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nc) * 900);
    for (int c = 0; c < nc; ++c)
        for (int st = 0; st < 10; ++st)
            for (int jt = 0; jt < 3; ++jt)
                for (int su_ = 0; su_ < 10; ++su_)
                    for (int ju = 0; ju < 3; ++ju)
                        trips.emplace_back(
                            sp.velocity_dof(jt, sp.p2_dof(c, st)),
                            sp.velocity_dof(ju, sp.p2_dof(c, su_)),
                            local[c](jt * 10 + st, ju * 10 + su_));
    SparseMat J(sp.num_velocity_dofs(), sp.num_velocity_dofs());
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

FeFunction l2_project(const FeSpacePair& sp, const VectorField& fn) {
    const int S = sp.num_scalar_dofs();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(S, 3);
    for (int c = 0; c < sp.mesh().num_cells(); ++c)
        for (int q = 0; q < sp.cell_rule().size(); ++q) {
            const double w = sp.cell_weight(c, q);
            const Eigen::Vector3d v = fn(sp.cell_point(c, q));
            for (int s = 0; s < 10; ++s)
                rhs.row(sp.p2_dof(c, s)) += w * sp.p2_value(q, s) * v.transpose();
        }
    FeFunction out = sp.zero(SpaceTag::velocity);
    for (int comp = 0; comp < 3; ++comp)
        out.coeff.segment(comp * S, S) =
            sp.scalar_mass_solver().solve(rhs.col(comp));
    return out;
}

FeFunction l2_project_pressure(
    const FeSpacePair& sp,
    const std::function<double(const Eigen::Vector3d&)>& fn) {
    // P1 mass assembled on the fly; projections of pressure data are rare.
    const int Np = sp.num_pressure_dofs();
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Np);
    for (int c = 0; c < sp.mesh().num_cells(); ++c)
        for (int q = 0; q < sp.cell_rule().size(); ++q) {
            const double w = sp.cell_weight(c, q);
            const double v = fn(sp.cell_point(c, q));
            for (int a = 0; a < 4; ++a) {
                rhs[sp.p1_dof(c, a)] += w * sp.p1_value(q, a) * v;
                for (int b = 0; b < 4; ++b)
                    trips.emplace_back(sp.p1_dof(c, a), sp.p1_dof(c, b),
                                       w * sp.p1_value(q, a) * sp.p1_value(q, b));
            }
        }
    SparseMat M(Np, Np);
    M.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<SparseMat> solver(M);
    FeFunction out = sp.zero(SpaceTag::pressure);
    out.coeff = solver.solve(rhs);
    return out;
}

namespace {

// Assembles and solves the constrained Stokes saddle system. Unknown layout:
// [u (3S) | p (Np) | mu (3 velocity-mean multipliers) | lambda (pressure mean)].
VelocityPressure constrained_stokes(const FeSpacePair& sp, double nu,
                                    const Eigen::VectorXd& rhs,
                                    const Eigen::Vector3d& mean) {
    const int S = sp.num_scalar_dofs();
    const int Nu = 3 * S;
    const int Np = sp.num_pressure_dofs();
    const int total = Nu + Np + 4;

    const SparseMat& K = sp.scalar_stiffness();
    const SparseMat& D = sp.divergence();
    const Eigen::VectorXd& e = sp.pressure_mean_vector();
    const Eigen::VectorXd& gs = sp.scalar_mean_vector();

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(K.nonZeros()) * 3 + D.nonZeros() * 2 +
                  2 * Np + 6 * S);
    for (int comp = 0; comp < 3; ++comp)
        for (int k = 0; k < K.outerSize(); ++k)
            for (SparseMat::InnerIterator it(K, k); it; ++it)
                trips.emplace_back(comp * S + it.row(), comp * S + it.col(),
                                   nu * it.value());
    for (int k = 0; k < D.outerSize(); ++k)
        for (SparseMat::InnerIterator it(D, k); it; ++it) {
            trips.emplace_back(Nu + it.row(), it.col(), it.value());
            trips.emplace_back(it.col(), Nu + it.row(), -it.value());
        }
    for (int comp = 0; comp < 3; ++comp)
        for (int s = 0; s < S; ++s) {
            trips.emplace_back(comp * S + s, Nu + Np + comp, gs[s]);
            trips.emplace_back(Nu + Np + comp, comp * S + s, gs[s]);
        }
    for (int qd = 0; qd < Np; ++qd) {
        trips.emplace_back(Nu + qd, Nu + Np + 3, e[qd]);
        trips.emplace_back(Nu + Np + 3, Nu + qd, e[qd]);
    }
    SparseMat A(total, total);
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd b = Eigen::VectorXd::Zero(total);
    b.head(Nu) = rhs;
    b.segment(Nu + Np, 3) = mean;

    Eigen::SparseLU<SparseMat> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error(
            "stokes_solve: singular saddle system (inf-sup or constraint "
            "failure)");
    const Eigen::VectorXd x = lu.solve(b);

    VelocityPressure out;
    out.u.tag = SpaceTag::velocity;
    out.u.coeff = x.head(Nu);
    out.p.tag = SpaceTag::pressure;
    out.p.coeff = x.segment(Nu, Np);
    return out;
}

}  // namespace

VelocityPressure stokes_solve(const FeSpacePair& sp, double nu,
                              const Eigen::VectorXd& rhs,
                              const Eigen::Vector3d& mean) {
    return constrained_stokes(sp, nu, rhs, mean);
}

VelocityPressure discrete_stokes_projection(const FeSpacePair& sp,
                                            const VectorField& u0,
                                            const GradientField& grad_u0) {
    const int S = sp.num_scalar_dofs();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * S);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int c = 0; c < sp.mesh().num_cells(); ++c) {
        const auto& mcell = sp.mesh().cell(c);
        for (int q = 0; q < sp.cell_rule().size(); ++q) {
            const double w = sp.cell_weight(c, q);
            const Eigen::Vector3d x = sp.cell_point(c, q);
            const Eigen::Matrix3d G = grad_u0(x);  // G(i,j) = d_i u_j
            mean += w * u0(x);
            for (int s = 0; s < 10; ++s) {
                const Eigen::Vector3d g =
                    mcell.jacobian_inv_t * sp.p2_ref_grad(q, s);
                for (int comp = 0; comp < 3; ++comp)
                    rhs[sp.velocity_dof(comp, sp.p2_dof(c, s))] +=
                        w * G.col(comp).dot(g);
            }
        }
    }
    return constrained_stokes(sp, 1.0, rhs, mean);
}

double discrete_divergence_residual(const FeSpacePair& sp,
                                    const FeFunction& u) {
    const Eigen::VectorXd r = sp.divergence() * u.coeff;
    return r.cwiseAbs().maxCoeff();
}

}  // namespace nsverify

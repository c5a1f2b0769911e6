#include "nsverify/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace nsverify {

namespace {

// The six axis permutations, in a fixed order. Permutation (a,b,c) generates
// the tetrahedron 0 -> e_a -> e_a+e_b -> (1,1,1) of the Kuhn split; it
// contains the points of the unit cube with x_a >= x_b >= x_c.
constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                              {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

int direction_index(const Eigen::Vector3i& d) {
    const int mask = d[0] + 2 * d[1] + 4 * d[2];
    return mask - 1;  // the seven edge directions have components in {0,1}
}

}  // namespace

int PeriodicMesh::wrap_vertex(const Eigen::Vector3i& lattice) const {
    auto m = [this](int a) { return ((a % n_) + n_) % n_; };
    return (m(lattice[0]) * n_ + m(lattice[1])) * n_ + m(lattice[2]);
}

Eigen::Vector3d PeriodicMesh::vertex_position(int v) const {
    const int k = v % n_;
    const int j = (v / n_) % n_;
    const int i = v / (n_ * n_);
    return Eigen::Vector3d(i, j, k) / static_cast<double>(n_);
}

PeriodicMesh PeriodicMesh::build(int n) {
    if (n < 2)
        throw std::invalid_argument(
            "PeriodicMesh::build: n must be >= 2 (periodic identification "
            "degenerates otherwise)");
    PeriodicMesh mesh;
    mesh.n_ = n;
    const double hx = 1.0 / n;
    mesh.cells_.reserve(6 * n * n * n);
    mesh.edge_midpoint_.assign(7 * n * n * n, Eigen::Vector3d::Zero());

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (const auto& perm : kPerms) {
                    Cell cell;
                    Eigen::Vector3i p(i, j, k);
                    cell.lattice[0] = p;
                    p[perm[0]] += 1;
                    cell.lattice[1] = p;
                    p[perm[1]] += 1;
                    cell.lattice[2] = p;
                    p[perm[2]] += 1;
                    cell.lattice[3] = p;  // = (i+1, j+1, k+1)
                    for (int v = 0; v < 4; ++v) {
                        cell.vertex[v] = mesh.wrap_vertex(cell.lattice[v]);
                        cell.x[v] = cell.lattice[v].cast<double>() * hx;
                    }
                    cell.jacobian.col(0) = cell.x[1] - cell.x[0];
                    cell.jacobian.col(1) = cell.x[2] - cell.x[0];
                    cell.jacobian.col(2) = cell.x[3] - cell.x[0];
                    cell.det_jacobian = std::abs(cell.jacobian.determinant());
                    cell.jacobian_inv_t = cell.jacobian.inverse().transpose();
                    cell.volume = cell.det_jacobian / 6.0;
                    cell.h = 0.0;
                    for (int a = 0; a < 4; ++a)
                        for (int b = a + 1; b < 4; ++b)
                            cell.h = std::max(cell.h,
                                              (cell.x[a] - cell.x[b]).norm());
                    mesh.max_h_ = std::max(mesh.max_h_, cell.h);

                    // Edge ids: base lattice point (lower endpoint) plus one of
                    // the seven monotone directions; unique even for n = 2,
                    // where a vertex pair alone would be ambiguous.
                    for (int e = 0; e < 6; ++e) {
                        const auto& lv = kEdgeVertices[e];
                        const Eigen::Vector3i base = cell.lattice[lv[0]];
                        const Eigen::Vector3i d = cell.lattice[lv[1]] - base;
                        const int id =
                            mesh.wrap_vertex(base) * 7 + direction_index(d);
                        cell.edge[e] = id;
                        mesh.edge_midpoint_[id] =
                            0.5 * (cell.x[lv[0]] + cell.x[lv[1]]);
                    }
                    mesh.cells_.push_back(cell);
                }

    // Face identification: translate the three corners so their componentwise
    // minimum lies in [0,n)^3; the wrapped base plus the sorted offset pattern
    // is a translation-invariant key.
    std::unordered_map<std::uint64_t, int> face_index;
    face_index.reserve(12 * n * n * n);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        Cell& cell = mesh.cells_[c];
        for (int f = 0; f < 4; ++f) {
            std::array<Eigen::Vector3i, 3> pts;
            int idx = 0;
            for (int v = 0; v < 4; ++v)
                if (v != f) pts[idx++] = cell.lattice[v];
            Eigen::Vector3i m = pts[0];
            for (int v = 1; v < 3; ++v) m = m.cwiseMin(pts[v]);
            std::array<int, 3> off{};
            for (int v = 0; v < 3; ++v) {
                const Eigen::Vector3i o = pts[v] - m;
                off[v] = o[0] + 2 * o[1] + 4 * o[2];
            }
            std::sort(off.begin(), off.end());
            std::uint64_t key = static_cast<std::uint64_t>(mesh.wrap_vertex(m));
            for (int v = 0; v < 3; ++v) key = key * 8 + off[v];

            auto it = face_index.find(key);
            if (it == face_index.end()) {
                Face face;
                face.cell_minus = c;
                face.local_minus = f;
                for (int v = 0; v < 3; ++v)
                    face.x[v] = pts[v].cast<double>() * hx;
                const Eigen::Vector3d e1 = face.x[1] - face.x[0];
                const Eigen::Vector3d e2 = face.x[2] - face.x[0];
                Eigen::Vector3d nrm = e1.cross(e2);
                face.area = 0.5 * nrm.norm();
                nrm.normalize();
                // Orient outward from cell_minus.
                const Eigen::Vector3d centroid_cell =
                    0.25 * (cell.x[0] + cell.x[1] + cell.x[2] + cell.x[3]);
                const Eigen::Vector3d centroid_face =
                    (face.x[0] + face.x[1] + face.x[2]) / 3.0;
                if (nrm.dot(centroid_face - centroid_cell) < 0.0) nrm = -nrm;
                face.normal = nrm;
                face.h = std::max({(face.x[0] - face.x[1]).norm(),
                                   (face.x[0] - face.x[2]).norm(),
                                   (face.x[1] - face.x[2]).norm()});
                face.shift_plus.setZero();
                const int id = static_cast<int>(mesh.faces_.size());
                mesh.faces_.push_back(face);
                face_index.emplace(key, id);
                cell.face[f] = id;
            } else {
                Face& face = mesh.faces_[it->second];
                if (face.cell_plus != -1)
                    throw std::logic_error(
                        "PeriodicMesh::build: face shared by more than two "
                        "cells");
                face.cell_plus = c;
                face.local_plus = f;
                // Plus-side frame may be a periodic translate of the
                // minus-side frame.
                const Eigen::Vector3i m_minus_lat = [&] {
                    const Cell& cm = mesh.cells_[face.cell_minus];
                    std::array<Eigen::Vector3i, 3> q;
                    int w = 0;
                    for (int v = 0; v < 4; ++v)
                        if (v != face.local_minus) q[w++] = cm.lattice[v];
                    Eigen::Vector3i mm = q[0];
                    for (int v = 1; v < 3; ++v) mm = mm.cwiseMin(q[v]);
                    return mm;
                }();
                face.shift_plus = (m - m_minus_lat).cast<double>() * hx;
                cell.face[f] = it->second;
            }
        }
    }
    for (const Face& face : mesh.faces_)
        if (face.cell_plus == -1)
            throw std::logic_error(
                "PeriodicMesh::build: boundary face on a torus");
    return mesh;
}

PeriodicMesh::JumpFrame PeriodicMesh::face_jump_frame(int f) const {
    if (f < 0 || f >= num_faces())
        throw std::out_of_range("PeriodicMesh::face_jump_frame: invalid face id");
    const Face& face = faces_[f];
    return JumpFrame{face.cell_plus, face.cell_minus, face.normal};
}

PeriodicMesh::Location PeriodicMesh::locate(const Eigen::Vector3d& p) const {
    Eigen::Vector3d q;
    for (int d = 0; d < 3; ++d) {
        q[d] = p[d] - std::floor(p[d]);
        if (q[d] >= 1.0) q[d] = 0.0;
    }
    Eigen::Vector3d s = q * n_;
    Eigen::Vector3i cube;
    Eigen::Vector3d frac;
    for (int d = 0; d < 3; ++d) {
        cube[d] = std::min(static_cast<int>(std::floor(s[d])), n_ - 1);
        frac[d] = s[d] - cube[d];
    }
    // The Kuhn tetrahedron of permutation (a,b,c) holds frac_a>=frac_b>=frac_c.
    std::array<int, 3> ord{0, 1, 2};
    std::stable_sort(ord.begin(), ord.end(),
                     [&frac](int a, int b) { return frac[a] > frac[b]; });
    int which = 0;
    for (int t = 0; t < 6; ++t)
        if (kPerms[t][0] == ord[0] && kPerms[t][1] == ord[1] &&
            kPerms[t][2] == ord[2]) {
            which = t;
            break;
        }
    const int cell_id =
        ((cube[0] * n_ + cube[1]) * n_ + cube[2]) * 6 + which;
    const Cell& cell = cells_[cell_id];
    const Eigen::Vector3d local =
        (cube.cast<double>() + frac) / static_cast<double>(n_);
    Eigen::Vector3d ref = cell.jacobian.inverse() * (local - cell.x[0]);
    return Location{cell_id, ref};
}

std::string PeriodicMesh::dump_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\n  \"n\": " << n_ << ",\n  \"vertices\": [";
    for (int v = 0; v < num_vertices(); ++v) {
        const Eigen::Vector3d x = vertex_position(v);
        os << (v ? "," : "") << "[" << x[0] << "," << x[1] << "," << x[2]
           << "]";
    }
    os << "],\n  \"cells\": [";
    for (int c = 0; c < num_cells(); ++c) {
        const Cell& cell = cells_[c];
        os << (c ? "," : "") << "[" << cell.vertex[0] << "," << cell.vertex[1]
           << "," << cell.vertex[2] << "," << cell.vertex[3] << "]";
    }
    os << "],\n  \"faces\": [";
    for (int f = 0; f < num_faces(); ++f) {
        const Face& face = faces_[f];
        os << (f ? "," : "") << "[" << face.cell_minus << "," << face.cell_plus
           << "]";
    }
    os << "]\n}\n";
    return os.str();
}

}  // namespace nsverify

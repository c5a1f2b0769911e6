#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nsverify {

/// Conforming tetrahedral partition of the unit torus [0,1)^3.
///
/// Each of the n^3 lattice cubes is split into six tetrahedra sharing the
/// cube's main diagonal (Kuhn split), so all cells are congruent up to
/// reflection and the shape-regularity ratio is mesh-independent. Vertices,
/// edges and faces are identified periodically; cell geometry is stored
/// unwrapped so that cells crossing the seam keep a valid affine map.
class PeriodicMesh {
  public:
    struct Cell {
        std::array<int, 4> vertex{};               // wrapped vertex ids
        std::array<Eigen::Vector3i, 4> lattice{};  // unwrapped lattice corners
        std::array<Eigen::Vector3d, 4> x{};        // unwrapped physical corners
        Eigen::Matrix3d jacobian;                  // [x1-x0 | x2-x0 | x3-x0]
        Eigen::Matrix3d jacobian_inv_t;
        double det_jacobian = 0.0;  // absolute value
        double volume = 0.0;
        double h = 0.0;                 // diameter (max edge length)
        std::array<int, 4> face{};      // global face ids, face f opposite vertex f
        std::array<int, 6> edge{};      // global edge ids, local order
                                        // (0,1),(0,2),(0,3),(1,2),(1,3),(2,3)
    };

    struct Face {
        int cell_minus = -1;  // first registering cell
        int cell_plus = -1;
        int local_minus = -1;  // local face index within each cell
        int local_plus = -1;
        std::array<Eigen::Vector3d, 3> x{};  // corners, cell_minus frame
        Eigen::Vector3d normal;              // unit, points minus -> plus
        Eigen::Vector3d shift_plus;          // minus-frame point + shift = plus-frame point
        double area = 0.0;
        double h = 0.0;  // diameter
    };

    /// Local vertex pairs of the six cell edges.
    static constexpr std::array<std::array<int, 2>, 6> kEdgeVertices{
        {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

    static PeriodicMesh build(int n);

    int n() const { return n_; }
    int num_vertices() const { return n_ * n_ * n_; }
    int num_edges() const { return 7 * n_ * n_ * n_; }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }

    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Face>& faces() const { return faces_; }
    const Cell& cell(int c) const { return cells_[c]; }
    const Face& face(int f) const { return faces_[f]; }

    /// Wrapped representative position of a vertex.
    Eigen::Vector3d vertex_position(int v) const;
    /// Representative midpoint position of an edge (any periodic image).
    Eigen::Vector3d edge_midpoint(int e) const { return edge_midpoint_[e]; }

    double max_h() const { return max_h_; }

    /// Orientation frame of a face: jump := trace(cell_plus) - trace(cell_minus),
    /// normal points from cell_minus into cell_plus.
    struct JumpFrame {
        int cell_plus;
        int cell_minus;
        Eigen::Vector3d normal;
    };
    JumpFrame face_jump_frame(int f) const;

    /// Cell containing the point (coordinates taken mod 1) together with its
    /// reference coordinates in that cell.
    struct Location {
        int cell;
        Eigen::Vector3d ref;
    };
    Location locate(const Eigen::Vector3d& p) const;

    int wrap_vertex(const Eigen::Vector3i& lattice) const;

    std::string dump_json() const;

  private:
    int n_ = 0;
    std::vector<Cell> cells_;
    std::vector<Face> faces_;
    std::vector<Eigen::Vector3d> edge_midpoint_;
    double max_h_ = 0.0;
};

}  // namespace nsverify

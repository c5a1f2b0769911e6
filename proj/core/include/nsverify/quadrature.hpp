#pragma once

#include <Eigen/Dense>
#include <vector>

namespace nsverify {

/// Quadrature rule on the reference tetrahedron {x,y,z >= 0, x+y+z <= 1}.
/// Conical product of Gauss-Jacobi rules; all weights positive; exact for
/// polynomials of total degree <= 2*m - 1 where m is the points-per-axis order.
struct TetQuadrature {
    std::vector<Eigen::Vector3d> points;
    std::vector<double> weights;  // sum to 1/6 (reference volume)
    int exact_degree = 0;

    int size() const { return static_cast<int>(points.size()); }
};

/// Rule on the reference triangle {x,y >= 0, x+y <= 1}; weights sum to 1/2.
struct TriQuadrature {
    std::vector<Eigen::Vector2d> points;
    std::vector<double> weights;
    int exact_degree = 0;

    int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule on [0,1]; weights sum to 1.
struct LineQuadrature {
    std::vector<double> points;
    std::vector<double> weights;
    int exact_degree = 0;

    int size() const { return static_cast<int>(points.size()); }
};

TetQuadrature make_tet_quadrature(int order);
TriQuadrature make_triangle_quadrature(int order);
LineQuadrature make_line_quadrature(int order);

/// Gauss-Jacobi rule on [0,1] for the weight (1-t)^alpha, by Golub-Welsch.
void gauss_jacobi_01(int m, double alpha, std::vector<double>& nodes,
                     std::vector<double>& weights);

}  // namespace nsverify

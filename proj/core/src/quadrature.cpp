#include "nsverify/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nsverify {

// Jacobi-matrix recurrence coefficients for weight (1-x)^alpha on [-1,1]
// (beta = 0), see Gautschi, "Orthogonal Polynomials".
void gauss_jacobi_01(int m, double alpha, std::vector<double>& nodes,
                     std::vector<double>& weights) {
    if (m < 1) throw std::invalid_argument("gauss_jacobi_01: m must be >= 1");
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        double a;
        if (k == 0) {
            a = -alpha / (alpha + 2.0);
        } else {
            const double s = 2.0 * k + alpha;
            a = -(alpha * alpha) / (s * (s + 2.0));
        }
        T(k, k) = a;
        if (k >= 1) {
            const double s = 2.0 * k + alpha;
            const double b2 = 4.0 * k * (k + alpha) * k * (k + alpha) /
                              (s * s * (s + 1.0) * (s - 1.0));
            const double b = std::sqrt(b2);
            T(k, k - 1) = b;
            T(k - 1, k) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double mu0 = std::pow(2.0, alpha + 1.0) / (alpha + 1.0);
    nodes.resize(m);
    weights.resize(m);
    for (int i = 0; i < m; ++i) {
        const double x = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = mu0 * v0 * v0 * std::pow(2.0, -(alpha + 1.0));
    }
}

// Duffy collapse of the unit cube onto the reference tetrahedron:
//   x = s1, y = s2 (1-s1), z = s3 (1-s1)(1-s2),  J = (1-s1)^2 (1-s2).
// The Jacobian factors are absorbed by Jacobi weights alpha = 2, 1, 0.
TetQuadrature make_tet_quadrature(int order) {
    std::vector<double> n2, w2, n1, w1, n0, w0;
    gauss_jacobi_01(order, 2.0, n2, w2);
    gauss_jacobi_01(order, 1.0, n1, w1);
    gauss_jacobi_01(order, 0.0, n0, w0);
    TetQuadrature q;
    q.exact_degree = 2 * order - 1;
    q.points.reserve(order * order * order);
    q.weights.reserve(order * order * order);
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j)
            for (int k = 0; k < order; ++k) {
                const double s1 = n2[i], s2 = n1[j], s3 = n0[k];
                Eigen::Vector3d p(s1, s2 * (1.0 - s1),
                                  s3 * (1.0 - s1) * (1.0 - s2));
                q.points.push_back(p);
                q.weights.push_back(w2[i] * w1[j] * w0[k]);
            }
    return q;
}

TriQuadrature make_triangle_quadrature(int order) {
    std::vector<double> n1, w1, n0, w0;
    gauss_jacobi_01(order, 1.0, n1, w1);
    gauss_jacobi_01(order, 0.0, n0, w0);
    TriQuadrature q;
    q.exact_degree = 2 * order - 1;
    q.points.reserve(order * order);
    q.weights.reserve(order * order);
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
            q.points.emplace_back(n1[i], n0[j] * (1.0 - n1[i]));
            q.weights.push_back(w1[i] * w0[j]);
        }
    return q;
}

LineQuadrature make_line_quadrature(int order) {
    LineQuadrature q;
    gauss_jacobi_01(order, 0.0, q.points, q.weights);
    q.exact_degree = 2 * order - 1;
    return q;
}

}  // namespace nsverify

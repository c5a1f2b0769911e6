#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace nsverify {

/// Planar Taylor-Green vortex, solenoidal and mean-free on the torus.
inline Eigen::Vector3d taylor_green(const Eigen::Vector3d& x) {
    const double X = 2.0 * std::numbers::pi * x[0];
    const double Y = 2.0 * std::numbers::pi * x[1];
    return {std::sin(X) * std::cos(Y), -std::cos(X) * std::sin(Y), 0.0};
}

/// G(i,j) = d_i u_j of the Taylor-Green field.
inline Eigen::Matrix3d taylor_green_grad(const Eigen::Vector3d& x) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double X = two_pi * x[0];
    const double Y = two_pi * x[1];
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 0) = two_pi * std::cos(X) * std::cos(Y);
    g(1, 0) = -two_pi * std::sin(X) * std::sin(Y);
    g(0, 1) = two_pi * std::sin(X) * std::sin(Y);
    g(1, 1) = -two_pi * std::cos(X) * std::cos(Y);
    return g;
}

}  // namespace nsverify

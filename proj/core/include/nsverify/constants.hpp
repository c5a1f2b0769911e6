#pragma once

#include <string>
#include <vector>

namespace nsverify {

/// Explicit constants entering the verification criterion. The embedding and
/// projection-stability entries have citable numeric values; the elliptic
/// regularity, interpolation and Clement-product entries are configuration
/// inputs that the certificate is conditional on, and every report carries
/// them together with a "user-certified" flag.
struct ConstantsTable {
    double c_e1 = 24.0;    // W^{1,2}  -> L^6 embedding
    double c_e2 = 22.0;    // W^{1,3/2} -> L^3 embedding
    double c_Pi1 = 14.0;   // L^3 stability of the Helmholtz projection
    double c_Pi2 = 35.0;   // W^{1,3/2} stability of the Helmholtz projection
    double c_P = 0.0;      // sqrt(4 pi^2 + 1) / (2 pi), set by default_table
    double c_ell = 1.0;    // Stokes elliptic regularity constant (user input)
    double c_i1 = 3.0;     // interpolation constants (user input)
    double c_i2 = 3.0;
    double c_i3 = 3.0;
    int k_edges = 4;       // faces per tetrahedron
    double c_tilde = 0.0;  // c_ell * max(c_i1, c_i2, k_edges * c_i3)
    double c_H1 = 6.0;     // gradient-estimator reliability constant (user input)

    /// Which entries are certified by the user rather than derived.
    std::vector<std::string> user_certified{"c_ell", "c_i1", "c_i2", "c_i3",
                                            "c_H1"};

    void refresh_derived();
    void validate() const;
    std::string to_json() const;
};

ConstantsTable default_table();

/// Riesz-transform bound 2*(p* - 1), p* = max(p, p/(p-1)). Symmetric under
/// p <-> p/(p-1).
double riesz_cp(double p);
/// Lp stability constant of the Helmholtz projection: 1 + sqrt(3) cp^2.
double helmholtz_c0(double p);
/// Gradient-stability constant: 1 + 3^((p*-1)/p*) cp^2.
double helmholtz_c1(double p);

}  // namespace nsverify

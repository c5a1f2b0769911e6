#pragma once

#include <string>
#include <vector>

#include "nsverify/constants.hpp"
#include "nsverify/fem.hpp"

namespace nsverify {

/// Residual-based reliability bounds for a Stokes Galerkin solution (u_h,pi_h)
/// with data F in the convention  nu <grad u, grad v> - <p, div v> = <F, v>.
///
/// Per cell K (h-weights differ between the two aggregates):
///   eta_K^2  = h_K^2 ||F + nu Lap u_h - grad pi_h||_K^2 + ||div u_h||_K^2
///              + (1/2) sum_{e in dK} h_e   ||[n_e.(grad u_h - pi_h I)]||_e^2
///   mu_K^2   = h_K^4 ||...||_K^2 + h_K^2 ||div u_h||_K^2
///              + (1/2) sum_{e in dK} h_e^3 ||[...]||_e^2
/// Interior face contributions are split evenly between the two adjacent
/// cells, so each face is counted once in the global sums.
///   H0 = c_tilde ( sum_K mu_K^2 + h_K^4 ||F - F_K||_K^2 )^{1/2}
///   H1 = ( c_H1^2 sum_K eta_K^2 + H0^2 )^{1/2}
struct EstimatorBreakdown {
    std::vector<double> element_residual;  // ||F + nu Lap u_h - grad pi_h||_K
    std::vector<double> divergence;        // ||div u_h||_K
    std::vector<double> jump_sq;           // (1/2) sum_{e in dK} ||[..]||_e^2 (unweighted)
    std::vector<double> oscillation;       // ||F - F_K||_K
    std::vector<double> eta_sq;            // per-cell eta_K^2
    std::vector<double> mu_bar_sq;         // per-cell mu_K^2
    double eta_total = 0.0;                // (sum eta_K^2)^{1/2}
    double H0 = 0.0;
    double H1 = 0.0;

    std::string to_csv(const PeriodicMesh& mesh) const;
};

EstimatorBreakdown estimate(const FeSpacePair& sp, const FeFunction& u,
                            const FeFunction& pi, const CellField& F,
                            double nu, const ConstantsTable& constants);

/// Upper bound for ||a||_{W^{-1,2}} of a componentwise mean-free field:
/// discrete Poisson energy plus a residual estimator for the Galerkin error,
///   bound = ||grad phi_h|| + c_H1 ( sum_K h_K^2 ||a||_K^2
///                                   + sum_e h_e ||[n_e . grad phi_h]||_e^2 )^{1/2}.
struct NegativeNormBound {
    double bound = 0.0;
    double discrete_energy = 0.0;  // ||grad phi_h||
    double estimator = 0.0;
};

NegativeNormBound negative_norm_w12(const FeSpacePair& sp, const CellField& a,
                                    const ConstantsTable& constants);

/// Integral over a face of |[n.(grad w - pi I)]|^2, pi optional (pass nullptr
/// for pure gradient jumps). w uses the vector-P2 layout.
double face_jump_norm_sq(const FeSpacePair& sp, int face, const FeFunction& w,
                         const FeFunction* pi);

}  // namespace nsverify

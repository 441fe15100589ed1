#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "rwg/covariance.hpp"
#include "rwg/waveguide.hpp"

namespace rwg {

/// Effective coupling and dissipation coefficients of the limit dynamics.
/// Gamma and GammaS carry the anti-diagonal convention (diagonal = minus
/// the off-diagonal row sum); Lambda/LambdaS/Kappa are the radiative and
/// evanescent coefficients per mode.
struct CouplingSet {
    Eigen::MatrixXd gamma;    ///< power exchange rates (symmetric, 1/length)
    Eigen::MatrixXd gamma_s;  ///< phase companion of gamma
    Eigen::MatrixXd gamma1;   ///< covariance of the diagonal phases
    Eigen::VectorXd lambda;   ///< radiative dissipation, >= 0
    Eigen::VectorXd lambda_s; ///< radiative dispersion
    Eigen::VectorXd kappa;    ///< evanescent dispersion

    int size() const { return static_cast<int>(lambda.size()); }

    std::string to_json() const;
    static CouplingSet from_json(const std::string& text);
};

/// Numerics knobs for the coefficient quadratures.
struct CouplingQuad {
    int transverse_order = 64; ///< tensor Gauss-Legendre order for type I
    int gamma_panels = 48;     ///< panels on the radiating spectral segment
    int gamma_order = 12;      ///< Gauss-Legendre order per panel
    double rel_tol = 1e-8;     ///< self-convergence target (panel doubling)
    int max_doublings = 6;
};

/// z-covariance of the coupling processes:
/// E[C_{j,l}(0) C_{j',l'}(z)] = amplitude * shape(z) / shape.variance.
/// The amplitude absorbs the kernel variance, so `amplitude` alone carries
/// the magnitude and `shape` only the z-profile.
struct CouplingCovariance {
    double amplitude = 0.0;
    Kernel1D shape;

    double operator()(double z) const {
        return shape.variance > 0.0 ? amplitude * shape(z) / shape.variance
                                    : 0.0;
    }
};

/// Guided-guided covariance descriptor for indices (j,l),(j',l').
CouplingCovariance mode_coupling_covariance(const ModeBasis& basis,
                                            const CovarianceModel& cov, int j,
                                            int l, int jp, int lp,
                                            int transverse_order = 64);

/// Amplitude of E[C_{j,t,gamma}(0) C_{j,t,gamma}(z)]: the guided-radiating
/// covariance, with the continuum mode (t, gamma) in place of a guided l.
double radiating_coupling_amplitude(const ModeBasis& basis,
                                    const CovarianceModel& cov, int j,
                                    const RadiatingMode& rm,
                                    int transverse_order = 64);

Eigen::MatrixXd gamma_matrix(const ModeBasis& basis, const CovarianceModel& cov,
                             const CouplingQuad& quad = {});
Eigen::MatrixXd gamma_s_matrix(const ModeBasis& basis,
                               const CovarianceModel& cov,
                               const CouplingQuad& quad = {});
Eigen::MatrixXd gamma1_matrix(const ModeBasis& basis,
                              const CovarianceModel& cov,
                              const CouplingQuad& quad = {});

/// Radiative dissipation Lambda_j: spectral integral over gamma in (0, k^2)
/// desingularized by gamma = k^2 sin^2(u). Converged by panel doubling;
/// throws quadrature_error with the best estimate if the target fails.
Eigen::VectorXd lambda_radiative(const ModeBasis& basis,
                                 const CovarianceModel& cov,
                                 const CouplingQuad& quad = {});

/// LambdaS (radiative dispersion) and Kappa (evanescent dispersion,
/// gamma = -s^2 with adaptive tail extension plus the E[c_jj(0)] term).
std::pair<Eigen::VectorXd, Eigen::VectorXd>
lambda_s_and_kappa(const ModeBasis& basis, const CovarianceModel& cov,
                   const CouplingQuad& quad = {});

/// All coefficients at once.
CouplingSet build_coupling(const ModeBasis& basis, const CovarianceModel& cov,
                           const CouplingQuad& quad = {});

} // namespace rwg

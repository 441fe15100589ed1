#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "rwg/coupling.hpp"
#include "rwg/covariance.hpp"
#include "rwg/waveguide.hpp"

namespace rwg {

/// Large-N limit of the mode-power dynamics: a diffusion
/// d/dz Q = d/du (gamma_inf(u) dQ/du) on (0,1) with Neumann at u=0 and
/// Dirichlet at u=1.
struct ContinuumModel {
    std::function<double(double)> gamma_inf;
    int grid = 256; ///< cells of the conservative discretization
};

/// Banded nearest-neighbor rates gamma_j = Gamma_{j,j+1} (the full
/// closed-form coefficient restricted to adjacent modes) plus the
/// dissipation vector concentrated on the last mode.
struct NearestNeighborRates {
    Eigen::VectorXd gamma;  ///< length N-1
    Eigen::VectorXd lambda; ///< zero except entry N-1
    bool premise_ok = true; ///< corr length >= core diameter
};

NearestNeighborRates nearest_neighbor_rates(const ModeBasis& basis,
                                            const CovarianceModel& cov,
                                            const CouplingQuad& quad = {});

/// Limit rate profile on u in (0,1), in frequency-free normalization:
/// the physical gamma_j approaches k^2 times this value, and the finite-N
/// table reports the observed scaling rather than absorbing it.
double gamma_infinity(double u, const WaveguideSpec& spec,
                      const CovarianceModel& cov, int transverse_order = 64);

struct Sturm1DResult {
    double eigenvalue = 0.0;   ///< lambda_cont at resolution `grid`
    double richardson = 0.0;   ///< extrapolated over (M, 2M)
    Eigen::VectorXd phi;       ///< positive eigenvector at cell centers,
                               ///< normalized to unit discrete L2 norm
    int grid = 0;
};

/// Smallest decay rate of H1 = d/du(gamma_inf d/du .) with phi'(0)=0,
/// phi(1)=0, by conservative second-order finite differences (fluxes at
/// half-grid points, mirror ghost at 0, eliminated Dirichlet row at 1).
Sturm1DResult h1_eigenproblem(const ContinuumModel& model);

/// Rayleigh quotient int gamma f'^2 / int f^2 for an admissible trial
/// function. Throws invalid_argument_error unless f'(0)=0 and f(1)=0
/// within 1e-8 of the trial's scale.
double variational_lambda(const ContinuumModel& model,
                          const std::function<double(double)>& f,
                          const std::function<double(double)>& df);

struct Sturm2DResult {
    double mu_tensor = 0.0;   ///< 2 lambda_cont from the 1D spectrum
    double mu_square = 0.0;   ///< independent 2D assembly + inverse iteration
    double mu_triangle = 0.0; ///< triangle domain with diagonal reflection
    double product_residual = 0.0; ///< H2 (phi x phi) + mu (phi x phi), max norm
    Eigen::VectorXd phi;      ///< 1D factor of the product eigenvector
    int grid = 0;
};

/// First eigenvalue of H2 on (0,1)^2 (Neumann at u=0,v=0; Dirichlet at
/// u=1,v=1) by three routes, plus the triangle-domain variant with the
/// reflecting diagonal.
Sturm2DResult h2_eigenproblem(const ContinuumModel& model);

struct ConvergenceRow {
    int n = 0;
    double lambda_n = 0.0;      ///< first decay rate of the banded system
    double mu_n = 0.0;          ///< first decay rate of its second moments
    double gap = 0.0;           ///< mu_n - 2 lambda_n
    double gap_rel = 0.0;       ///< |gap| / lambda_n
    double lambda_scaled = 0.0; ///< lambda_n N^2 (continuum normalization)
    double profile_dev = 0.0;   ///< max |V_j - phi(j/N)| after normalization
};

/// Banded nearest-neighbor chains with absorption only at j = N-1:
/// rates gamma_j = gamma_inf((j+1/2)/N), Lambda_{N-1} = lambda_absorb.
/// lambda_scaled converges to the h1 eigenvalue and gap_rel to zero.
std::vector<ConvergenceRow>
finite_n_convergence(const std::function<double(double)>& gamma_inf,
                     double lambda_absorb, const std::vector<int>& ns);

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows);

} // namespace rwg

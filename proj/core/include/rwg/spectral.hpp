#pragma once

#include <Eigen/Dense>
#include <string>

#include "rwg/coupling.hpp"
#include "rwg/triangle.hpp"

namespace rwg {

/// Top (Perron) eigenpair of a symmetric matrix with irreducible
/// off-diagonal pattern: the eigenvector is normalized to unit length and
/// positive entries.
struct PerronPair {
    double value = 0.0;
    Eigen::VectorXd vector;
    double separation = 0.0; ///< distance to the second eigenvalue
};

/// Throws spectral_error when the off-diagonal pattern is reducible or the
/// top eigenvalue is degenerate (separation < 1e-12 * scale).
PerronPair perron_pair(const Eigen::MatrixXd& M);

/// Decay rates of the first and second moment systems.
///   -lambda = top eigenvalue of A = Gamma - diag(Lambda), eigenvector V
///   -mu     = top eigenvalue of Theta - Psi on the triangle, eigenvector W
/// gap = mu - 2 lambda <= 0 (relative intensity fluctuations grow at -gap).
struct SpectralResult {
    double lambda = 0.0;
    Eigen::VectorXd V;
    double mu = 0.0;
    Eigen::VectorXd W; ///< triangle-indexed
    double gap = 0.0;
    double separation_mean = 0.0;
    double separation_second = 0.0;
    TriangleIndex idx;

    std::string to_json() const;
};

SpectralResult growth_rates(const Eigen::MatrixXd& gamma,
                            const Eigen::VectorXd& lambda);
SpectralResult growth_rates(const CouplingSet& coupling);

/// Q_asym_j(z) = c_V V_j exp(-lambda z), c_V = sum_l V_l |a_l|^2.
Eigen::VectorXd asymptotic_mean(const SpectralResult& sr,
                                const Eigen::VectorXd& a, double z);

/// S_asym_jl(z) = c_W W_jl exp(-mu z) on the triangle,
/// c_W = sum_{j,l} W_jl |a_j|^2 |a_l|^2 (full double sum, W reflected).
Eigen::VectorXd asymptotic_second(const SpectralResult& sr,
                                  const Eigen::VectorXd& a, double z);

/// Second-order perturbation data for lambda(theta) and mu(theta).
struct ExpansionResult {
    double lambda0 = 0.0, lambda1 = 0.0, lambda2 = 0.0;
    double mu0 = 0.0, mu1 = 0.0, mu2 = 0.0;
    Eigen::VectorXd V1; ///< first-order eigenvector correction, length N
    Eigen::VectorXd W1; ///< triangle-indexed correction of W
    double theta = 0.0;

    double lambda_predicted() const {
        return lambda0 + theta * lambda1 + theta * theta * lambda2;
    }
    double mu_predicted() const {
        return mu0 + theta * mu1 + theta * theta * mu2;
    }
    double gap_predicted() const {
        return theta * theta * (mu2 - 2.0 * lambda2);
    }
};

/// Weak dissipation: Lambda = theta Lambda1 against a fixed irreducible
/// Gamma. First-order vectors solve singular systems on the complement of
/// the Perron direction; closed forms are used when Gamma_jl is constant
/// off the diagonal.
ExpansionResult weak_dissipation_expansion(const Eigen::MatrixXd& gamma,
                                           const Eigen::VectorXd& lambda1,
                                           double theta);

/// Weak coupling: Gamma = theta Gamma1 against fixed Lambda with a unique
/// minimum (error if the minimum is attained twice within 1e-12).
ExpansionResult weak_coupling_expansion(const Eigen::VectorXd& lambda,
                                        const Eigen::MatrixXd& gamma1,
                                        double theta);

} // namespace rwg

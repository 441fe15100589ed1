#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rwg/coupling.hpp"
#include "rwg/triangle.hpp"

namespace rwg {

struct McConfig {
    long long paths = 10000;
    std::uint64_t seed = 1;
    double dz = 1e-3;   ///< SDE step
    double z_max = 1.0; ///< SDE horizon
    int workers = 1;    ///< path-parallel workers; results do not depend on it

    void validate() const; ///< paths >= 100 for any reported estimate
};

struct McEstimate {
    Eigen::VectorXd mean;
    Eigen::VectorXd std_error; ///< sample sd / sqrt(paths)
    long long paths_used = 0;

    std::string to_json() const;
};

/// Feynman-Kac estimator of Q(z): jump process with generator Gamma
/// (exact exponential clocks), weight exp(-int Lambda), payoff |a_j|^2.
/// Component j conditions on the start J_0 = j; one path stream is replayed
/// across all starts (common random numbers).
McEstimate fk_mean_power(const Eigen::MatrixXd& gamma,
                         const Eigen::VectorXd& lambda,
                         const Eigen::VectorXd& a, double z,
                         const McConfig& cfg);
McEstimate fk_mean_power(const CouplingSet& coupling, const Eigen::VectorXd& a,
                         double z, const McConfig& cfg);

/// Feynman-Kac estimator of S(z) on the triangle: random walk with the
/// rates read off Theta, weight exp(-int (Lambda_J + Lambda_L)), payoff
/// (2 - delta) |a_J|^2 |a_L|^2 (the triangle weighting of the initial data).
McEstimate fk_second_moment(const Eigen::MatrixXd& gamma,
                            const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& a, double z,
                            const McConfig& cfg);
McEstimate fk_second_moment(const CouplingSet& coupling,
                            const Eigen::VectorXd& a, double z,
                            const McConfig& cfg);

/// Raw per-path payoffs of the mean-power estimator for the first
/// min(max_samples, paths) paths: one row per path, one column per start
/// index. Meant for diagnostic dumps, capped by the caller.
Eigen::MatrixXd fk_mean_power_samples(const Eigen::MatrixXd& gamma,
                                      const Eigen::VectorXd& lambda,
                                      const Eigen::VectorXd& a, double z,
                                      const McConfig& cfg,
                                      long long max_samples);

/// One checkpoint of the amplitude SDE simulation.
struct SdeCheckpoint {
    double z = 0.0;
    McEstimate mean_power;    ///< E[P_j], length N
    McEstimate second_moment; ///< S_jl = (2-delta) E[P_j P_l], triangle
};

struct SdeResult {
    std::vector<SdeCheckpoint> checkpoints;
    TriangleIndex idx;
    /// complex amplitudes at the last checkpoint for the first
    /// min(sample_paths, paths) paths (one row per path), when requested
    Eigen::MatrixXcd sample_paths;
};

/// Euler-Maruyama on the limiting amplitude SDE, with the deterministic
/// diagonal drift integrated exactly (exponential factor per step) and the
/// coupling/noise terms taken explicit. No per-step renormalization.
/// Throws when dz max(|Gamma_jj|, Lambda_j, Gamma1_jj) > 0.05 or Gamma1
/// has an eigenvalue below -1e-10.
SdeResult simulate_sde(const CouplingSet& coupling, const Eigen::VectorXd& a,
                       const McConfig& cfg,
                       const std::vector<double>& checkpoints,
                       long long sample_paths = 0);

} // namespace rwg

#pragma once

#include <string>
#include <vector>

#include "rwg/covariance.hpp"
#include "rwg/coupling.hpp"
#include "rwg/montecarlo.hpp"
#include "rwg/waveguide.hpp"

namespace rwg {

/// One experiment: a sectioned key = value file. Unknown keys are errors
/// (no silent typos); every value is range-checked before any computation.
struct ExperimentConfig {
    WaveguideSpec waveguide;

    // [perturbation]
    CovarianceModel::Kind kind = CovarianceModel::Kind::type_two;
    KernelFamily kernel = KernelFamily::gaussian;
    double variance = 1e-4;
    double corr_length = 2.0;
    TransverseKernel::Family transverse_family = TransverseKernel::Family::gaussian;
    double transverse_corr_length = 0.5;

    // [numerics]
    CouplingQuad quad;
    int grid = 256;

    // [mc]
    McConfig mc;

    // [run]
    std::vector<double> z_points = {0.5, 1.0, 2.0};
    double x_probe = 0.0;
    std::string out_dir = "out";
    bool synthetic = false;
    double gamma_const = 1.0;
    std::vector<double> lambda1 = {1.0, 2.0};
    double theta = 1e-2;
    std::vector<double> theta_list = {1e-2, 5e-3, 2.5e-3};
    std::string expansion_mode = "dissipation"; ///< dissipation | coupling
    std::vector<int> ns = {8, 16, 32, 64};
    double lambda_absorb = 1.0;
    long long sample_dump = 0; ///< raw FK sample rows to dump (0 = off)

    CovarianceModel covariance() const;

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_text(const std::string& text,
                                       const std::string& origin = "<text>");
};

} // namespace rwg

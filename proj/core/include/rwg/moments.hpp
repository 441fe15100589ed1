#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rwg/coupling.hpp"
#include "rwg/spectral.hpp"
#include "rwg/triangle.hpp"
#include "rwg/waveguide.hpp"

namespace rwg {

/// The second-moment system on the triangle: d/dz S = (Theta - Psi) S with
/// Theta symmetric (row sums zero) and Psi diagonal with entries
/// Lambda_j + Lambda_l.
struct TriangleOperator {
    TriangleIndex idx;
    Eigen::MatrixXd theta;
    Eigen::VectorXd psi;

    Eigen::MatrixXd generator() const {
        Eigen::MatrixXd g = theta;
        g.diagonal() -= psi;
        return g;
    }
};

TriangleOperator assemble_triangle(const Eigen::MatrixXd& gamma,
                                   const Eigen::VectorXd& lambda);
TriangleOperator assemble_triangle(const CouplingSet& coupling);

/// Q_j(0) = |a_j|^2.
Eigen::VectorXd initial_mean(const Eigen::VectorXd& a);

/// S_jl(0) = (2 - delta_jl) |a_j|^2 |a_l|^2 on the triangle.
Eigen::VectorXd initial_second(const Eigen::VectorXd& a);

/// exp(M z) v for symmetric M via one eigendecomposition, reusable over z.
class SymmetricPropagator {
public:
    explicit SymmetricPropagator(const Eigen::MatrixXd& m);
    Eigen::VectorXd apply(const Eigen::VectorXd& v, double z) const;
    const Eigen::VectorXd& eigenvalues() const { return evals_; }

private:
    Eigen::MatrixXd evecs_;
    Eigen::VectorXd evals_;
};

/// Q(z) = exp((Gamma - diag(Lambda)) z) Q0, entrywise clamped at zero.
/// Entries below -1e-12 before clamping bump *clamp_warnings.
Eigen::VectorXd propagate_mean(const Eigen::MatrixXd& gamma,
                               const Eigen::VectorXd& lambda,
                               const Eigen::VectorXd& q0, double z,
                               int* clamp_warnings = nullptr);
Eigen::VectorXd propagate_mean(const CouplingSet& coupling,
                               const Eigen::VectorXd& q0, double z,
                               int* clamp_warnings = nullptr);

/// S(z) = exp((Theta - Psi) z) S0 on the triangle.
Eigen::VectorXd propagate_second(const TriangleOperator& op,
                                 const Eigen::VectorXd& s0, double z,
                                 int* clamp_warnings = nullptr);

/// Large-z moments of the pointwise intensity |p(x,z)|^2:
///   m2 = sum_j phi_j(x)^2 / beta_j c_V V_j exp(-lambda z)
///   m4 = sum_{j,l} phi_j(x)^2 phi_l(x)^2 / (beta_j beta_l) c_W W_jl exp(-mu z)
struct IntensityMoments {
    double m2 = 0.0;
    double m4 = 0.0;
};

IntensityMoments intensity_moments(const ModeBasis& basis,
                                   const SpectralResult& sr,
                                   const Eigen::VectorXd& a, double x,
                                   double z);

/// m4 / m2^2 together with its asymptotic growth exponent -(mu - 2 lambda).
struct ScintillationRatio {
    double ratio = 0.0;
    double exponent = 0.0;
};

ScintillationRatio scintillation_ratio(const ModeBasis& basis,
                                       const SpectralResult& sr,
                                       const Eigen::VectorXd& a, double x,
                                       double z);

/// CSV emitters (17 significant digits, LF endings, schema comment line).
void write_mean_csv(const std::string& path, const std::vector<double>& zs,
                    const std::vector<Eigen::VectorXd>& qs);
void write_second_csv(const std::string& path, const TriangleIndex& idx,
                      const std::vector<double>& zs,
                      const std::vector<Eigen::VectorXd>& ss);

} // namespace rwg

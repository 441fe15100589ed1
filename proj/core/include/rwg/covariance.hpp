#pragma once

#include <functional>

#include "rwg/errors.hpp"

namespace rwg {

enum class KernelFamily { gaussian, exponential };

/// Stationary 1D covariance kernel R(z) with closed-form half-line
/// transforms. Conventions:
///   gaussian:     R(z) = variance exp(-z^2 / (2 l^2))
///   exponential:  R(z) = variance exp(-|z| / l)
struct Kernel1D {
    KernelFamily family = KernelFamily::gaussian;
    double variance = 1.0;
    double corr_length = 1.0;

    void validate() const;
    double operator()(double z) const;

    /// C_cos(b) = int_0^inf R(z) cos(b z) dz   (even in b, >= 0)
    double c_cos(double b) const;
    /// C_sin(b) = int_0^inf R(z) sin(b z) dz   (odd in b)
    double c_sin(double b) const;
    /// C_lap(b, s) = int_0^inf R(z) cos(b z) exp(-s z) dz,  s >= 0
    double c_lap(double b, double s) const;
    /// Full-line Fourier transform int R(z) exp(-i b z) dz = 2 C_cos(b).
    double fourier(double b) const { return 2.0 * c_cos(b); }
};

/// Numerical transforms for validation; `z_max` truncates the tail.
double numeric_cos_transform(const std::function<double(double)>& R, double b,
                             double z_max);
double numeric_sin_transform(const std::function<double(double)>& R, double b,
                             double z_max);
double numeric_lap_transform(const std::function<double(double)>& R, double b,
                             double s, double z_max);

/// Transverse covariance of the core index fluctuations (type I).
/// Stationary families are correlations (value 1 on the diagonal); the
/// overall variance lives in the longitudinal kernel. A separable kernel
/// g(x) g(x') is available for non-stationary profiles.
struct TransverseKernel {
    enum class Family { gaussian, exponential, separable };
    Family family = Family::gaussian;
    double corr_length = 1.0;
    std::function<double(double)> separable_g; ///< used when family==separable

    void validate() const;
    double operator()(double x, double xp) const;
};

/// Perturbation statistics. Type I: interior index fluctuations with
/// factorized covariance R_c(x,x') R_l(z). Type II: boundary fluctuations
/// nu_1, nu_2, i.i.d. with common covariance R_II(z).
struct CovarianceModel {
    enum class Kind { type_one, type_two };
    Kind kind = Kind::type_two;

    TransverseKernel transverse; ///< type I only
    Kernel1D longitudinal;       ///< type I: R_{I,l} (carries the variance)
    Kernel1D boundary;           ///< type II: R_II

    void validate() const;
    /// The z-direction kernel relevant to this model.
    const Kernel1D& z_kernel() const {
        return kind == Kind::type_one ? longitudinal : boundary;
    }

    static CovarianceModel type_two(Kernel1D r2) {
        CovarianceModel m;
        m.kind = Kind::type_two;
        m.boundary = r2;
        return m;
    }
    static CovarianceModel type_one(TransverseKernel rc, Kernel1D rl) {
        CovarianceModel m;
        m.kind = Kind::type_one;
        m.transverse = rc;
        m.longitudinal = rl;
        return m;
    }
};

} // namespace rwg

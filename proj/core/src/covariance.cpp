#include "rwg/covariance.hpp"

#include <cmath>
#include <sstream>

#include "rwg/quadrature.hpp"
#include "rwg/special.hpp"

namespace rwg {

void Kernel1D::validate() const {
    if (variance < 0.0)
        throw invalid_argument_error("kernel variance must be >= 0");
    if (!(corr_length > 0.0))
        throw invalid_argument_error("kernel corr_length must be > 0");
}

double Kernel1D::operator()(double z) const {
    const double l = corr_length;
    if (family == KernelFamily::gaussian)
        return variance * std::exp(-z * z / (2.0 * l * l));
    return variance * std::exp(-std::abs(z) / l);
}

double Kernel1D::c_cos(double b) const {
    const double l = corr_length;
    if (family == KernelFamily::gaussian)
        return variance * l * std::sqrt(M_PI / 2.0) *
               std::exp(-0.5 * b * b * l * l);
    return variance * l / (1.0 + b * b * l * l);
}

double Kernel1D::c_sin(double b) const {
    const double l = corr_length;
    if (family == KernelFamily::gaussian) {
        // int_0^inf exp(-z^2/2l^2) sin(bz) dz = sqrt(2) l F(b l / sqrt(2))
        return variance * l * std::sqrt(2.0) * dawson(b * l / std::sqrt(2.0));
    }
    return variance * l * l * b / (1.0 + b * b * l * l);
}

double Kernel1D::c_lap(double b, double s) const {
    const double l = corr_length;
    if (s < 0.0) throw invalid_argument_error("c_lap requires s >= 0");
    if (family == KernelFamily::gaussian) {
        // Re of int_0^inf exp(-z^2/2l^2) exp((-s+ib)z) dz via the Faddeeva
        // function: l sqrt(pi/2) Re w((b + i s) l / sqrt(2)).
        const std::complex<double> z(b * l / std::sqrt(2.0),
                                     s * l / std::sqrt(2.0));
        return variance * l * std::sqrt(M_PI / 2.0) * faddeeva(z).real();
    }
    const double a = 1.0 + s * l;
    return variance * l * a / (a * a + b * b * l * l);
}

namespace {

double oscillatory_quad(const std::function<double(double)>& f, double b,
                        double z_max) {
    // Panel width bounded by a fraction of the oscillation period.
    const double period = 2.0 * M_PI / std::max(std::abs(b), 1e-30);
    const double w = std::min(z_max / 8.0, 0.25 * period);
    const int panels = static_cast<int>(std::ceil(z_max / w));
    return integrate_panels(f, 0.0, z_max, panels, 16);
}

} // namespace

double numeric_cos_transform(const std::function<double(double)>& R, double b,
                             double z_max) {
    return oscillatory_quad([&](double z) { return R(z) * std::cos(b * z); }, b,
                            z_max);
}

double numeric_sin_transform(const std::function<double(double)>& R, double b,
                             double z_max) {
    return oscillatory_quad([&](double z) { return R(z) * std::sin(b * z); }, b,
                            z_max);
}

double numeric_lap_transform(const std::function<double(double)>& R, double b,
                             double s, double z_max) {
    return oscillatory_quad(
        [&](double z) { return R(z) * std::cos(b * z) * std::exp(-s * z); }, b,
        z_max);
}

void TransverseKernel::validate() const {
    if (family == Family::separable) {
        if (!separable_g)
            throw invalid_argument_error(
                "separable transverse kernel needs its factor g");
        return;
    }
    if (!(corr_length > 0.0))
        throw invalid_argument_error("transverse corr_length must be > 0");
}

double TransverseKernel::operator()(double x, double xp) const {
    switch (family) {
    case Family::gaussian: {
        const double r = (x - xp) / corr_length;
        return std::exp(-0.5 * r * r);
    }
    case Family::exponential:
        return std::exp(-std::abs(x - xp) / corr_length);
    case Family::separable:
        return separable_g(x) * separable_g(xp);
    }
    return 0.0;
}

void CovarianceModel::validate() const {
    if (kind == Kind::type_one) {
        transverse.validate();
        longitudinal.validate();
    } else {
        boundary.validate();
    }
}

} // namespace rwg

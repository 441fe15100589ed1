#pragma once

#include <complex>

namespace rwg {

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im(z) >= 0.
/// Accuracy ~1e-13 relative over the upper half-plane.
std::complex<double> faddeeva(std::complex<double> z);

/// Dawson integral F(x) = exp(-x^2) \int_0^x exp(t^2) dt.
double dawson(double x);

} // namespace rwg

#include "rwg/special.hpp"

#include <cmath>

namespace rwg {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// Laplace continued fraction for w(z), accurate for |z| >= ~7 in the
// closed upper half-plane. Evaluated bottom-up with a fixed depth.
std::complex<double> faddeeva_cf(std::complex<double> z, int depth = 64) {
    std::complex<double> r(0.0, 0.0);
    for (int n = depth; n >= 1; --n) r = (0.5 * n) / (z - r);
    return std::complex<double>(0.0, 1.0) / (kSqrtPi * (z - r));
}

// Lattice (trapezoid/midpoint) representation with pole correction
// (Chiarella-Reichel). Two interleaved lattices are available; the caller
// picks the one whose nodes are farther from Re(z) so the formula stays
// well-conditioned even for real z.
//
//   on-node lattice  t_k = k h:        w = S(z) + 2 exp(-z^2)/(1 - exp(-2 pi i z/h))
//   midpoint lattice t_k = (k+1/2) h:  w = S(z) + 2 exp(-z^2)/(1 + exp(-2 pi i z/h))
//
// with S(z) = (i h / pi) sum_k exp(-t_k^2) / (z - t_k).
std::complex<double> faddeeva_lattice(std::complex<double> z, bool midpoint) {
    const double h = 0.25;
    const std::complex<double> I(0.0, 1.0);
    std::complex<double> s(0.0, 0.0);
    const double off = midpoint ? 0.5 : 0.0;
    // Only |t| <= ~8.7 contributes above 1e-33.
    const int K = 35;
    for (int k = -K; k <= K; ++k) {
        const double t = (k + off) * h;
        s += std::exp(-t * t) / (z - t);
    }
    s *= I * h / M_PI;
    const std::complex<double> q = std::exp(-2.0 * M_PI * I * z / h);
    const std::complex<double> corr =
        2.0 * std::exp(-z * z) / (midpoint ? (1.0 + q) : (1.0 - q));
    return s + corr;
}

} // namespace

std::complex<double> faddeeva(std::complex<double> z) {
    // Symmetry w(-conj(z)) = conj(w(z)) folds onto Re(z) >= 0.
    if (z.real() < 0.0) return std::conj(faddeeva(std::complex<double>(-z.real(), z.imag())));
    if (std::norm(z) >= 49.0) return faddeeva_cf(z);
    // Pick the lattice whose nodes are farther from Re(z).
    const double frac = z.real() / 0.25 - std::floor(z.real() / 0.25);
    const bool midpoint = (frac < 0.25 || frac > 0.75);
    return faddeeva_lattice(z, midpoint);
}

double dawson(double x) {
    // F(x) = (sqrt(pi)/2) Im w(x) for real x.
    return 0.5 * kSqrtPi * faddeeva(std::complex<double>(x, 0.0)).imag();
}

} // namespace rwg

#pragma once

#include <functional>
#include <vector>

namespace rwg {

/// Gauss-Legendre rule on (-1, 1).
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussLegendre(int order);
};

/// Cached rule lookup (rules are immutable once built).
const GaussLegendre& gauss_legendre(int order);

/// Single Gauss-Legendre panel on (a, b).
double integrate(const std::function<double(double)>& f, double a, double b,
                 int order = 32);

/// Composite rule: `panels` equal panels of the given order on (a, b).
double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, int panels, int order = 16);

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // estimated absolute error
    bool converged = true;
};

/// Adaptive bisection of Gauss-Legendre panels. The error estimate per
/// panel is |GL(a,b) - GL(a,m) - GL(m,b)|.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double rel_tol = 1e-12,
                              double abs_tol = 1e-14, int max_depth = 30,
                              int order = 15);

} // namespace rwg

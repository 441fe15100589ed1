#include "rwg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rwg {

// Nodes are the roots of P_n, found by Newton iteration on the standard
// Chebyshev initial guesses; weights w = 2 / ((1-x^2) P_n'(x)^2).
GaussLegendre::GaussLegendre(int order) {
    if (order < 1) throw std::invalid_argument("GaussLegendre: order < 1");
    const int n = order;
    nodes.resize(n);
    weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

const GaussLegendre& gauss_legendre(int order) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, GaussLegendre(order)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int order) {
    const GaussLegendre& gl = gauss_legendre(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += gl.weights[i] * f(c + h * gl.nodes[i]);
    return s * h;
}

double integrate_panels(const std::function<double(double)>& f, double a,
                        double b, int panels, int order) {
    double s = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        s += integrate(f, a + p * w, a + (p + 1) * w, order);
    return s;
}

namespace {

void adapt(const std::function<double(double)>& f, double a, double b,
           double coarse, double tol, int depth, int max_depth, int order,
           QuadResult& out) {
    const double m = 0.5 * (a + b);
    const double left = integrate(f, a, m, order);
    const double right = integrate(f, m, b, order);
    const double fine = left + right;
    const double err = std::abs(fine - coarse);
    if (err < tol || depth >= max_depth) {
        out.value += fine;
        out.error += err;
        if (depth >= max_depth && err >= tol) out.converged = false;
        return;
    }
    adapt(f, a, m, left, 0.5 * tol, depth + 1, max_depth, order, out);
    adapt(f, m, b, right, 0.5 * tol, depth + 1, max_depth, order, out);
}

} // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double rel_tol, double abs_tol,
                              int max_depth, int order) {
    QuadResult out;
    if (a == b) return out;
    const double coarse = integrate(f, a, b, order);
    const double tol = std::max(abs_tol, rel_tol * std::abs(coarse));
    adapt(f, a, b, coarse, tol, 0, max_depth, order, out);
    return out;
}

} // namespace rwg

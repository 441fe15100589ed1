#include "rwg/waveguide.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rwg/quadrature.hpp"

namespace rwg {

double WaveguideSpec::v_number() const { return std::sqrt(n * n - 1.0) * k * d; }

void WaveguideSpec::validate() const {
    std::ostringstream msg;
    if (!(n > 1.0)) msg << "waveguide.n must be > 1 (got " << n << ")";
    else if (!(d > 0.0)) msg << "waveguide.d must be > 0 (got " << d << ")";
    else if (!(k > 0.0)) msg << "waveguide.k must be > 0 (got " << k << ")";
    else if (!std::isfinite(v_number()))
        msg << "normalized contrast sqrt(n^2-1) k d is not finite";
    else
        return;
    throw invalid_argument_error(msg.str());
}

namespace {

// Pole-free dispersion functions. Both branches are rewritten without
// tangents so bisection never meets a pole:
//   even: F(s) = s sin(s/2) - cos(s/2) sqrt(V^2 - s^2)
//   odd:  F(s) = sin(s/2) sqrt(V^2 - s^2) + s cos(s/2)
double dispersion_f(int j, double s, double V) {
    const double z = std::sqrt(std::max(V * V - s * s, 0.0));
    if (j % 2 == 0) return s * std::sin(0.5 * s) - std::cos(0.5 * s) * z;
    return std::sin(0.5 * s) * z + s * std::cos(0.5 * s);
}

double dispersion_df(int j, double s, double V) {
    const double z2 = std::max(V * V - s * s, 0.0);
    const double z = std::sqrt(z2);
    const double sn = std::sin(0.5 * s), cs = std::cos(0.5 * s);
    if (j % 2 == 0) {
        // d/ds [s sin - cos z] = sin + (s/2) cos + (1/2) sin z + cos s/z
        return sn + 0.5 * s * cs + 0.5 * sn * z + (z > 0 ? cs * s / z : 0.0);
    }
    return 0.5 * cs * z - (z > 0 ? sn * s / z : 0.0) + cs - 0.5 * s * sn;
}

double solve_bracket(int j, double lo, double hi, double V) {
    const double w = hi - lo;
    double a = lo + 1e-13 * std::max(1.0, w), b = hi - 1e-13 * std::max(1.0, w);
    double fa = dispersion_f(j, a, V), fb = dispersion_f(j, b, V);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) {
        std::ostringstream msg;
        msg << "dispersion bracket failure on (" << lo << ", " << hi
            << ") for mode j=" << j << ": F has the same sign at both ends";
        throw bracket_error(msg.str());
    }
    while (b - a > 1e-13 * std::max(1.0, a)) {
        const double m = 0.5 * (a + b);
        const double fm = dispersion_f(j, m, V);
        if (fa * fm <= 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    // Newton polish, kept inside the bracket.
    double s = 0.5 * (a + b);
    for (int it = 0; it < 4; ++it) {
        const double df = dispersion_df(j, s, V);
        if (df == 0.0) break;
        const double step = dispersion_f(j, s, V) / df;
        const double s1 = s - step;
        if (s1 <= lo || s1 >= hi) break;
        s = s1;
        if (std::abs(step) < 1e-16 * std::max(1.0, s)) break;
    }
    return s;
}

double normalization(int j, double sigma, double zeta, double d) {
    const double half = 0.5;
    double denom;
    if (j % 2 == 0) {
        const double c = std::cos(0.5 * sigma);
        denom = (half + std::sin(sigma) / (2.0 * sigma)) + c * c / zeta;
    } else {
        const double s = std::sin(0.5 * sigma);
        denom = (half - std::sin(sigma) / (2.0 * sigma)) + s * s / zeta;
    }
    return std::sqrt(1.0 / (d * denom));
}

} // namespace

ModeCount count_modes(const WaveguideSpec& spec) {
    spec.validate();
    ModeCount out;
    const double V = spec.v_number();
    out.n_formula = static_cast<int>(std::floor(V / M_PI));
    out.n_roots = static_cast<int>(solve_dispersion(spec, 0.0).size());
    return out;
}

std::vector<GuidedMode> solve_dispersion(const WaveguideSpec& spec,
                                         double cutoff_zeta) {
    spec.validate();
    const double V = spec.v_number();
    std::vector<GuidedMode> modes;
    for (int j = 0;; ++j) {
        const double lo = j * M_PI;
        const double hi = std::min((j + 1) * M_PI, V);
        if (hi - lo <= 1e-12 * std::max(1.0, V)) break;
        const double sigma = solve_bracket(j, lo, hi, V);
        const double zeta = std::sqrt(std::max(V * V - sigma * sigma, 0.0));
        if (zeta < cutoff_zeta) continue; // mode at cutoff: A_j diverges
        GuidedMode m;
        m.j = j;
        m.sigma = sigma;
        m.zeta = zeta;
        m.beta = std::sqrt(spec.n * spec.n * spec.k * spec.k -
                           sigma * sigma / (spec.d * spec.d));
        m.norm = normalization(j, sigma, zeta, spec.d);
        modes.push_back(m);
        if (hi >= V) break;
    }
    return modes;
}

double eval_guided(const GuidedMode& mode, const WaveguideSpec& spec, double x) {
    const double d = spec.d;
    const double ax = std::abs(x);
    if (mode.parity() == Parity::even) {
        if (ax <= 0.5 * d) return mode.norm * std::cos(mode.sigma * x / d);
        return mode.norm * std::cos(0.5 * mode.sigma) *
               std::exp(-mode.zeta * (ax / d - 0.5));
    }
    if (ax <= 0.5 * d) return mode.norm * std::sin(mode.sigma * x / d);
    const double sgn = x > 0 ? 1.0 : -1.0;
    return mode.norm * std::sin(0.5 * mode.sigma) * sgn *
           std::exp(-mode.zeta * (ax / d - 0.5));
}

double eval_guided_deriv(const GuidedMode& mode, const WaveguideSpec& spec,
                         double x) {
    const double d = spec.d;
    const double ax = std::abs(x);
    const double sgn = x >= 0 ? 1.0 : -1.0;
    if (mode.parity() == Parity::even) {
        if (ax <= 0.5 * d)
            return -mode.norm * (mode.sigma / d) * std::sin(mode.sigma * x / d);
        // phi = A cos(sigma/2) exp(-zeta(|x|/d - 1/2)); d|x|/dx = sgn(x)
        return -sgn * mode.norm * std::cos(0.5 * mode.sigma) * (mode.zeta / d) *
               std::exp(-mode.zeta * (ax / d - 0.5));
    }
    if (ax <= 0.5 * d)
        return mode.norm * (mode.sigma / d) * std::cos(mode.sigma * x / d);
    // phi = A sin(sigma/2) sgn(x) exp(-zeta(|x|/d - 1/2))
    return -mode.norm * std::sin(0.5 * mode.sigma) * (mode.zeta / d) *
           std::exp(-mode.zeta * (ax / d - 0.5));
}

RadiatingMode radiating_mode(const WaveguideSpec& spec, Parity t, double gamma) {
    spec.validate();
    if (!(gamma < spec.k * spec.k)) {
        std::ostringstream msg;
        msg << "radiating mode requires gamma < k^2 (gamma=" << gamma
            << ", k^2=" << spec.k * spec.k << ")";
        throw invalid_argument_error(msg.str());
    }
    RadiatingMode m;
    m.t = t;
    m.gamma = gamma;
    m.eta = std::sqrt(spec.n * spec.n * spec.k * spec.k - gamma) * spec.d;
    m.xi = std::sqrt(spec.k * spec.k - gamma) * spec.d;
    const double ce = std::cos(0.5 * m.eta), se = std::sin(0.5 * m.eta);
    double denom;
    if (t == Parity::even)
        denom = m.xi * m.xi * ce * ce + m.eta * m.eta * se * se;
    else
        denom = m.xi * m.xi * se * se + m.eta * m.eta * ce * ce;
    m.norm = std::sqrt(m.xi * spec.d / (2.0 * M_PI * denom));
    return m;
}

double eval_radiating(const RadiatingMode& mode, const WaveguideSpec& spec,
                      double x) {
    const double d = spec.d;
    const double ax = std::abs(x);
    const double u = mode.xi * (ax / d - 0.5);
    if (mode.t == Parity::even) {
        if (ax <= 0.5 * d) return mode.norm * std::cos(mode.eta * x / d);
        return mode.norm * (std::cos(0.5 * mode.eta) * std::cos(u) -
                            mode.eta / mode.xi * std::sin(0.5 * mode.eta) *
                                std::sin(u));
    }
    if (ax <= 0.5 * d) return mode.norm * std::sin(mode.eta * x / d);
    const double sgn = x > 0 ? 1.0 : -1.0;
    return mode.norm * sgn *
           (std::sin(0.5 * mode.eta) * std::cos(u) +
            mode.eta / mode.xi * std::cos(0.5 * mode.eta) * std::sin(u));
}

ModeBasis::ModeBasis(const WaveguideSpec& spec, double cutoff_zeta)
    : spec_(spec) {
    const auto all = solve_dispersion(spec, 0.0);
    n_roots_ = static_cast<int>(all.size());
    n_formula_ = static_cast<int>(std::floor(spec.v_number() / M_PI));
    for (const auto& m : all) {
        if (m.zeta < cutoff_zeta)
            ++n_at_cutoff_;
        else
            modes_.push_back(m);
    }
}

double ModeBasis::boundary_value(int j) const {
    const GuidedMode& m = modes_.at(j);
    if (m.parity() == Parity::even) return m.norm * std::cos(0.5 * m.sigma);
    return m.norm * std::sin(0.5 * m.sigma);
}

double ModeBasis::boundary_sq_deriv(int j) const {
    const double b = boundary_value(j);
    return -2.0 * modes_.at(j).zeta / spec_.d * b * b;
}

std::vector<double> source_amplitudes(const ModeBasis& basis) {
    std::vector<double> a(basis.size());
    for (int j = 0; j < basis.size(); ++j)
        a[j] = 0.5 * std::sqrt(basis.mode(j).beta) *
               basis.eval(j, basis.spec().x_s);
    return a;
}

double source_amplitude_radiating(const WaveguideSpec& spec, Parity t,
                                  double gamma) {
    const RadiatingMode m = radiating_mode(spec, t, gamma);
    return 0.5 * std::pow(std::abs(gamma), 0.25) *
           eval_radiating(m, spec, spec.x_s);
}

namespace {

// Transverse inner product over (-X, X) with mandatory breakpoints at the
// core boundary and panel widths bounded by the fastest oscillation.
double transverse_inner(const std::function<double(double)>& g,
                        const std::function<double(double)>& f, double X,
                        double d, double max_wavenumber) {
    const double lam = 2.0 * M_PI / std::max(max_wavenumber, 1.0 / d);
    const double max_panel = 0.75 * lam;
    auto piece = [&](double a, double b) {
        if (b <= a) return 0.0;
        const int panels =
            std::max(2, static_cast<int>(std::ceil((b - a) / max_panel)));
        return integrate_panels([&](double x) { return g(x) * f(x); }, a, b,
                                panels, 12);
    };
    return piece(-X, -0.5 * d) + piece(-0.5 * d, 0.5 * d) + piece(0.5 * d, X);
}

} // namespace

double completeness_defect(const WaveguideSpec& spec, const ModeBasis& basis,
                           const std::function<double(double)>& f,
                           double half_width, const CompletenessGrid& grid) {
    spec.validate();
    const double X = half_width;
    const double norm2 = transverse_inner(f, f, X, spec.d, 0.0);

    double guided = 0.0;
    for (int j = 0; j < basis.size(); ++j) {
        const GuidedMode& m = basis.mode(j);
        auto phi = [&](double x) { return eval_guided(m, spec, x); };
        const double ip = transverse_inner(phi, f, X, spec.d, m.sigma / spec.d);
        guided += ip * ip;
    }

    const double k2 = spec.k * spec.k;
    double cont = 0.0;
    for (Parity t : {Parity::even, Parity::odd}) {
        // radiating part: gamma = k^2 sin^2(u) removes the 1/sqrt(gamma)
        // endpoint and the xi -> 0 square-root behavior at gamma = k^2
        cont += integrate_panels(
            [&](double u) {
                const double su = std::sin(u), cu = std::cos(u);
                const double gamma = k2 * su * su;
                const RadiatingMode m = radiating_mode(spec, t, gamma);
                auto phi = [&](double x) { return eval_radiating(m, spec, x); };
                const double ip = transverse_inner(
                    phi, f, X, spec.d, std::max(m.eta, m.xi) / spec.d);
                return ip * ip * 2.0 * k2 * su * cu;
            },
            0.0, 0.5 * M_PI, grid.panels, grid.order);
        // evanescent part: gamma = -s^2
        const double smax = std::sqrt(std::max(-grid.gamma_min, 0.0));
        if (smax > 0.0) {
            cont += integrate_panels(
                [&](double s) {
                    const double gamma = -s * s;
                    const RadiatingMode m = radiating_mode(spec, t, gamma);
                    auto phi = [&](double x) {
                        return eval_radiating(m, spec, x);
                    };
                    const double ip = transverse_inner(
                        phi, f, X, spec.d, std::max(m.eta, m.xi) / spec.d);
                    return ip * ip * 2.0 * s;
                },
                0.0, smax, grid.panels, grid.order);
        }
    }
    return norm2 - guided - cont;
}

} // namespace rwg

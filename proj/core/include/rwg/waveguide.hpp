#pragma once

#include <functional>
#include <vector>

#include "rwg/errors.hpp"

namespace rwg {

/// Ideal slab waveguide: relative core index n > 1 against a unit
/// background, core diameter d, homogeneous wavenumber k, and the source
/// transverse position x_s.
struct WaveguideSpec {
    double n = 1.5;
    double d = 1.0;
    double k = 10.0;
    double x_s = 0.0;

    /// Normalized contrast sqrt(n^2-1) k d.
    double v_number() const;
    /// Throws invalid_argument_error when n <= 1, d <= 0 or k <= 0.
    void validate() const;
};

enum class Parity { even, odd };

/// One guided mode: sigma_j in (j pi, (j+1) pi), zeta_j = sqrt(beta_j^2-k^2) d,
/// beta_j the modal wavenumber, norm the L2 normalization constant A_j.
/// Parity is even for even j.
struct GuidedMode {
    int j = 0;
    double sigma = 0.0;
    double zeta = 0.0;
    double beta = 0.0;
    double norm = 0.0;

    Parity parity() const { return j % 2 == 0 ? Parity::even : Parity::odd; }
};

struct ModeCount {
    int n_formula = 0; ///< floor(sqrt(n^2-1) k d / pi)
    int n_roots = 0;   ///< dispersion roots found by bracketed search
};

/// Number of guided modes: the asymptotic floor formula next to the count
/// of dispersion roots actually found. All downstream code uses the roots.
ModeCount count_modes(const WaveguideSpec& spec);

/// All dispersion roots in increasing sigma order. Even j solve
/// tan(s/2) = sqrt(V^2-s^2)/s, odd j solve tan(s/2) = -s/sqrt(V^2-s^2),
/// recast in pole-free form and bisected on (j pi, min((j+1) pi, V)).
/// Roots with zeta < cutoff_zeta are dropped (normalization diverges there).
std::vector<GuidedMode> solve_dispersion(const WaveguideSpec& spec,
                                         double cutoff_zeta = 1e-8);

/// Guided eigenfunction phi_j(x): trigonometric in the core, exponential
/// tails outside, phi_j(-x) = (-1)^j phi_j(x).
double eval_guided(const GuidedMode& mode, const WaveguideSpec& spec, double x);

/// d/dx of phi_j at x.
double eval_guided_deriv(const GuidedMode& mode, const WaveguideSpec& spec,
                         double x);

/// Improper (delta-normalized) eigenfunction of the continuous spectrum,
/// parity t, spectral parameter gamma < k^2.
struct RadiatingMode {
    Parity t = Parity::even;
    double gamma = 0.0;
    double eta = 0.0;  ///< sqrt(n^2 k^2 - gamma) d
    double xi = 0.0;   ///< sqrt(k^2 - gamma) d
    double norm = 0.0; ///< A_{t,gamma}
};

/// Throws invalid_argument_error for gamma >= k^2.
RadiatingMode radiating_mode(const WaveguideSpec& spec, Parity t, double gamma);

double eval_radiating(const RadiatingMode& mode, const WaveguideSpec& spec,
                      double x);

/// The mode set of one waveguide. Immutable after construction.
class ModeBasis {
public:
    explicit ModeBasis(const WaveguideSpec& spec, double cutoff_zeta = 1e-8);

    const WaveguideSpec& spec() const { return spec_; }
    const std::vector<GuidedMode>& modes() const { return modes_; }
    int size() const { return static_cast<int>(modes_.size()); }
    const GuidedMode& mode(int j) const { return modes_.at(j); }
    int n_formula() const { return n_formula_; }
    int n_roots() const { return n_roots_; }
    /// Roots rejected because zeta < cutoff (mode at cutoff).
    int n_at_cutoff() const { return n_at_cutoff_; }

    double eval(int j, double x) const { return eval_guided(modes_[j], spec_, x); }
    double eval_deriv(int j, double x) const {
        return eval_guided_deriv(modes_[j], spec_, x);
    }
    /// phi_j(d/2); with the parity sign, phi_j(-d/2) = (-1)^j of this.
    double boundary_value(int j) const;
    /// d/dx [phi_j^2](d/2) = -(2 zeta_j / d) phi_j(d/2)^2.
    double boundary_sq_deriv(int j) const;

private:
    WaveguideSpec spec_;
    std::vector<GuidedMode> modes_;
    int n_formula_ = 0;
    int n_roots_ = 0;
    int n_at_cutoff_ = 0;
};

/// a_{j,s} = (sqrt(beta_j)/2) phi_j(x_s) for all guided modes.
std::vector<double> source_amplitudes(const ModeBasis& basis);

/// a_{t,gamma,s} = (|gamma|^{1/4}/2) phi_{t,gamma}(x_s).
double source_amplitude_radiating(const WaveguideSpec& spec, Parity t,
                                  double gamma);

/// Resolution of the spectral-integral grid used by completeness_defect.
struct CompletenessGrid {
    double gamma_min = -200.0; ///< evanescent truncation (-Gamma_max)
    int panels = 24;           ///< panels per spectral segment
    int order = 16;            ///< Gauss-Legendre order per panel
};

/// || f ||^2 - sum_j |(phi_j, f)|^2 - sum_t int |(phi_{t,gamma}, f)|^2 dgamma
/// over gamma in (gamma_min, k^2). `half_width` bounds the transverse
/// support of f: integrals run over (-half_width, half_width).
double completeness_defect(const WaveguideSpec& spec, const ModeBasis& basis,
                           const std::function<double(double)>& f,
                           double half_width, const CompletenessGrid& grid);

} // namespace rwg

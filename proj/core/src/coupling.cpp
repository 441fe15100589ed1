#include "rwg/coupling.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rwg/quadrature.hpp"

namespace rwg {

namespace {

using json = nlohmann::json;

// Tensor Gauss-Legendre of R_c(x,x') f(x) g(x') over the core square.
double core_double_integral(const WaveguideSpec& spec,
                            const TransverseKernel& rc,
                            const std::function<double(double)>& f,
                            const std::function<double(double)>& g,
                            int order) {
    const GaussLegendre& gl = gauss_legendre(order);
    const double h = 0.5 * spec.d;
    std::vector<double> x(order), fv(order), gv(order);
    for (int i = 0; i < order; ++i) {
        x[i] = h * gl.nodes[i];
        fv[i] = f(x[i]);
        gv[i] = g(x[i]);
    }
    double s = 0.0;
    for (int i = 0; i < order; ++i) {
        double row = 0.0;
        for (int j = 0; j < order; ++j)
            row += gl.weights[j] * rc(x[i], x[j]) * gv[j];
        s += gl.weights[i] * fv[i] * row;
    }
    return s * h * h;
}

double boundary_product_sum(double pj_m, double pl_m, double pjp_m, double plp_m,
                            double pj_p, double pl_p, double pjp_p,
                            double plp_p) {
    return pj_m * pl_m * pjp_m * plp_m + pj_p * pl_p * pjp_p * plp_p;
}

} // namespace

CouplingCovariance mode_coupling_covariance(const ModeBasis& basis,
                                            const CovarianceModel& cov, int j,
                                            int l, int jp, int lp,
                                            int transverse_order) {
    cov.validate();
    const WaveguideSpec& spec = basis.spec();
    CouplingCovariance out;
    out.shape = cov.z_kernel();
    if (cov.kind == CovarianceModel::Kind::type_two) {
        const double c = (spec.n * spec.n - 1.0) * spec.d;
        const double xm = -0.5 * spec.d, xp = 0.5 * spec.d;
        out.amplitude =
            c * c *
            boundary_product_sum(basis.eval(j, xm), basis.eval(l, xm),
                                 basis.eval(jp, xm), basis.eval(lp, xm),
                                 basis.eval(j, xp), basis.eval(l, xp),
                                 basis.eval(jp, xp), basis.eval(lp, xp)) *
            cov.boundary.variance;
        return out;
    }
    auto fjl = [&](double x) { return basis.eval(j, x) * basis.eval(l, x); };
    auto fjplp = [&](double x) { return basis.eval(jp, x) * basis.eval(lp, x); };
    out.amplitude = core_double_integral(spec, cov.transverse, fjl, fjplp,
                                         transverse_order) *
                    cov.longitudinal.variance;
    return out;
}

double radiating_coupling_amplitude(const ModeBasis& basis,
                                    const CovarianceModel& cov, int j,
                                    const RadiatingMode& rm,
                                    int transverse_order) {
    const WaveguideSpec& spec = basis.spec();
    if (cov.kind == CovarianceModel::Kind::type_two) {
        const double c = (spec.n * spec.n - 1.0) * spec.d;
        const double xm = -0.5 * spec.d, xp = 0.5 * spec.d;
        const double pm = basis.eval(j, xm) * eval_radiating(rm, spec, xm);
        const double pp = basis.eval(j, xp) * eval_radiating(rm, spec, xp);
        return c * c * (pm * pm + pp * pp) * cov.boundary.variance;
    }
    auto f = [&](double x) {
        return basis.eval(j, x) * eval_radiating(rm, spec, x);
    };
    return core_double_integral(spec, cov.transverse, f, f, transverse_order) *
           cov.longitudinal.variance;
}

namespace {

// Shared assembly of the guided-guided matrices. `transform` maps the
// wavenumber difference beta_l - beta_j to the closed-form z-integral.
Eigen::MatrixXd
guided_matrix(const ModeBasis& basis, const CovarianceModel& cov,
              const CouplingQuad& quad, bool diagonal_pairs,
              const std::function<double(const Kernel1D&, double)>& transform) {
    const int N = basis.size();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    for (int j = 0; j < N; ++j) {
        const double bj = basis.mode(j).beta;
        for (int l = 0; l < N; ++l) {
            if (!diagonal_pairs && l == j) continue;
            const double bl = basis.mode(l).beta;
            const CouplingCovariance cc =
                diagonal_pairs
                    ? mode_coupling_covariance(basis, cov, j, j, l, l,
                                               quad.transverse_order)
                    : mode_coupling_covariance(basis, cov, j, l, j, l,
                                               quad.transverse_order);
            const double pref =
                std::pow(basis.spec().k, 4) / (2.0 * bj * bl);
            // amplitude already carries the kernel variance
            Kernel1D unit = cc.shape;
            unit.variance = 1.0;
            M(j, l) = pref * cc.amplitude * transform(unit, bl - bj);
        }
    }
    if (!diagonal_pairs)
        for (int j = 0; j < N; ++j) M(j, j) = -(M.row(j).sum() - M(j, j));
    return M;
}

} // namespace

Eigen::MatrixXd gamma_matrix(const ModeBasis& basis, const CovarianceModel& cov,
                             const CouplingQuad& quad) {
    return guided_matrix(
        basis, cov, quad, false,
        [](const Kernel1D& k, double db) { return k.c_cos(db); });
}

Eigen::MatrixXd gamma_s_matrix(const ModeBasis& basis,
                               const CovarianceModel& cov,
                               const CouplingQuad& quad) {
    return guided_matrix(
        basis, cov, quad, false,
        [](const Kernel1D& k, double db) { return k.c_sin(db); });
}

Eigen::MatrixXd gamma1_matrix(const ModeBasis& basis,
                              const CovarianceModel& cov,
                              const CouplingQuad& quad) {
    return guided_matrix(
        basis, cov, quad, true,
        [](const Kernel1D& k, double) { return k.c_cos(0.0); });
}

namespace {

// Panel-doubling convergence wrapper for the spectral integrals.
double converged_panels(const std::function<double(int)>& value_at,
                        const CouplingQuad& quad, const char* what) {
    int panels = quad.gamma_panels;
    double prev = value_at(panels);
    for (int it = 0; it < quad.max_doublings; ++it) {
        panels *= 2;
        const double cur = value_at(panels);
        const double diff = std::abs(cur - prev);
        if (diff <= quad.rel_tol * std::max(std::abs(cur), 1e-300) ||
            diff < 1e-15)
            return cur;
        prev = cur;
    }
    std::ostringstream msg;
    msg << what << ": spectral quadrature did not reach rel_tol="
        << quad.rel_tol << " after " << quad.max_doublings << " doublings";
    throw quadrature_error(msg.str(), prev, std::abs(prev) * quad.rel_tol);
}

} // namespace

Eigen::VectorXd lambda_radiative(const ModeBasis& basis,
                                 const CovarianceModel& cov,
                                 const CouplingQuad& quad) {
    cov.validate();
    const WaveguideSpec& spec = basis.spec();
    const int N = basis.size();
    const double k = spec.k;
    Kernel1D unit = cov.z_kernel();
    const double var = unit.variance;
    unit.variance = 1.0;
    Eigen::VectorXd lam(N);
    for (int j = 0; j < N; ++j) {
        const double bj = basis.mode(j).beta;
        auto value_at = [&](int panels) {
            double s = 0.0;
            if (var == 0.0) return 0.0;
            for (Parity t : {Parity::even, Parity::odd}) {
                // gamma = k^2 sin^2 u maps the 1/sqrt(gamma) endpoint and
                // the xi -> 0 edge to a smooth integrand in u
                s += integrate_panels(
                    [&](double u) {
                        const double su = std::sin(u), cu = std::cos(u);
                        const double gamma = k * k * su * su;
                        const RadiatingMode rm = radiating_mode(spec, t, gamma);
                        const double amp = radiating_coupling_amplitude(
                            basis, cov, j, rm, quad.transverse_order);
                        return std::pow(k, 5) * cu / bj * amp *
                               unit.c_cos(k * su - bj);
                    },
                    0.0, 0.5 * M_PI, panels, quad.gamma_order);
            }
            return s;
        };
        lam(j) = converged_panels(value_at, quad, "lambda_radiative");
    }
    return lam;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
lambda_s_and_kappa(const ModeBasis& basis, const CovarianceModel& cov,
                   const CouplingQuad& quad) {
    cov.validate();
    const WaveguideSpec& spec = basis.spec();
    const int N = basis.size();
    const double k = spec.k;
    Kernel1D unit = cov.z_kernel();
    const double var = unit.variance;
    unit.variance = 1.0;

    Eigen::VectorXd lam_s(N), kap(N);
    for (int j = 0; j < N; ++j) {
        const double bj = basis.mode(j).beta;

        auto lam_s_at = [&](int panels) {
            if (var == 0.0) return 0.0;
            double s = 0.0;
            for (Parity t : {Parity::even, Parity::odd}) {
                s += integrate_panels(
                    [&](double u) {
                        const double su = std::sin(u), cu = std::cos(u);
                        const double gamma = k * k * su * su;
                        const RadiatingMode rm = radiating_mode(spec, t, gamma);
                        const double amp = radiating_coupling_amplitude(
                            basis, cov, j, rm, quad.transverse_order);
                        return std::pow(k, 5) * cu / bj * amp *
                               unit.c_sin(k * su - bj);
                    },
                    0.0, 0.5 * M_PI, panels, quad.gamma_order);
            }
            return s;
        };
        lam_s(j) = converged_panels(lam_s_at, quad, "lambda_s");

        // Evanescent segment gamma = -s^2: int_0^inf (k^4/bj) amp C_lap ds,
        // extended block by block until the tail is negligible.
        auto kappa_at = [&](int panels) {
            if (var == 0.0) return 0.0;
            double total = 0.0;
            const double block = 2.0 * k;
            double lo = 0.0;
            for (int blk = 0; blk < 64; ++blk) {
                double piece = 0.0;
                for (Parity t : {Parity::even, Parity::odd}) {
                    piece += integrate_panels(
                        [&](double s) {
                            const double gamma = -s * s;
                            const RadiatingMode rm =
                                radiating_mode(spec, t, gamma);
                            const double amp = radiating_coupling_amplitude(
                                basis, cov, j, rm, quad.transverse_order);
                            return std::pow(k, 4) / bj * amp *
                                   unit.c_lap(bj, s);
                        },
                        lo, lo + block, panels, quad.gamma_order);
                }
                total += piece;
                lo += block;
                if (std::abs(piece) <
                    1e-10 * std::max(std::abs(total), 1e-300))
                    break;
            }
            return total;
        };
        kap(j) = converged_panels(kappa_at, quad, "kappa");

        // E[c_jj(0)] term: zero for type I, boundary derivative for type II
        if (cov.kind == CovarianceModel::Kind::type_two) {
            const double c2 = (spec.n * spec.n - 1.0) * spec.d * spec.d;
            const double ecjj =
                c2 * cov.boundary(0.0) * basis.boundary_sq_deriv(j);
            kap(j) += k * k / (2.0 * bj) * ecjj;
        }
    }
    return {lam_s, kap};
}

CouplingSet build_coupling(const ModeBasis& basis, const CovarianceModel& cov,
                           const CouplingQuad& quad) {
    CouplingSet cs;
    cs.gamma = gamma_matrix(basis, cov, quad);
    cs.gamma_s = gamma_s_matrix(basis, cov, quad);
    cs.gamma1 = gamma1_matrix(basis, cov, quad);
    cs.lambda = lambda_radiative(basis, cov, quad);
    auto [ls, kp] = lambda_s_and_kappa(basis, cov, quad);
    cs.lambda_s = ls;
    cs.kappa = kp;
    return cs;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd m(n, n == 0 ? 0 : static_cast<int>(rows[0].size()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j].get<double>();
    return m;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<int>(arr.size()));
    for (int i = 0; i < v.size(); ++i) v(i) = arr[i].get<double>();
    return v;
}

} // namespace

std::string CouplingSet::to_json() const {
    json doc;
    doc["schema"] = "rwg.coupling.v1";
    doc["n_modes"] = size();
    doc["gamma"] = matrix_to_json(gamma);
    doc["gamma_s"] = matrix_to_json(gamma_s);
    doc["gamma1"] = matrix_to_json(gamma1);
    doc["lambda"] = vector_to_json(lambda);
    doc["lambda_s"] = vector_to_json(lambda_s);
    doc["kappa"] = vector_to_json(kappa);
    return doc.dump(2);
}

CouplingSet CouplingSet::from_json(const std::string& text) {
    json doc = json::parse(text);
    if (doc.value("schema", "") != "rwg.coupling.v1")
        throw config_error("coupling JSON: unknown or missing schema");
    CouplingSet cs;
    cs.gamma = matrix_from_json(doc.at("gamma"));
    cs.gamma_s = matrix_from_json(doc.at("gamma_s"));
    cs.gamma1 = matrix_from_json(doc.at("gamma1"));
    cs.lambda = vector_from_json(doc.at("lambda"));
    cs.lambda_s = vector_from_json(doc.at("lambda_s"));
    cs.kappa = vector_from_json(doc.at("kappa"));
    return cs;
}

} // namespace rwg

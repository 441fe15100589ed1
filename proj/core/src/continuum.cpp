#include "rwg/continuum.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rwg/moments.hpp"
#include "rwg/quadrature.hpp"
#include "rwg/spectral.hpp"
#include "rwg/triangle.hpp"

namespace rwg {

NearestNeighborRates nearest_neighbor_rates(const ModeBasis& basis,
                                            const CovarianceModel& cov,
                                            const CouplingQuad& quad) {
    const int n = basis.size();
    NearestNeighborRates out;
    out.gamma = Eigen::VectorXd::Zero(std::max(n - 1, 0));
    out.lambda = Eigen::VectorXd::Zero(n);
    const double k = basis.spec().k;
    Kernel1D unit = cov.z_kernel();
    unit.variance = 1.0;
    for (int j = 0; j + 1 < n; ++j) {
        const double bj = basis.mode(j).beta, bl = basis.mode(j + 1).beta;
        const CouplingCovariance cc = mode_coupling_covariance(
            basis, cov, j, j + 1, j, j + 1, quad.transverse_order);
        out.gamma(j) =
            std::pow(k, 4) / (2.0 * bj * bl) * cc.amplitude * unit.c_cos(bl - bj);
    }
    if (n >= 1) {
        const Eigen::VectorXd lam = lambda_radiative(basis, cov, quad);
        out.lambda(n - 1) = lam(n - 1);
    }
    out.premise_ok = cov.z_kernel().corr_length >= basis.spec().d;
    return out;
}

double gamma_infinity(double u, const WaveguideSpec& spec,
                      const CovarianceModel& cov, int transverse_order) {
    if (!(u > 0.0 && u < 1.0))
        throw invalid_argument_error("gamma_infinity: u must be in (0,1)");
    const double n2 = spec.n * spec.n;
    const double denom = n2 / (n2 - 1.0) - u * u;
    const double arg = M_PI * std::sqrt(n2 - 1.0) * u / (spec.n * spec.d);
    if (cov.kind == CovarianceModel::Kind::type_two)
        return 2.0 * (n2 - 1.0) * std::pow(u, 4) / denom *
               cov.boundary.fourier(arg);
    // type I: sin(pi x / d) sin(pi x' / d) double integral of the
    // transverse correlation over the core square
    const GaussLegendre& gl = gauss_legendre(transverse_order);
    const double h = 0.5 * spec.d;
    double ss = 0.0;
    for (int i = 0; i < transverse_order; ++i) {
        const double x = h * gl.nodes[i];
        double row = 0.0;
        for (int j = 0; j < transverse_order; ++j) {
            const double xp = h * gl.nodes[j];
            row += gl.weights[j] * cov.transverse(x, xp) *
                   std::sin(M_PI * xp / spec.d);
        }
        ss += gl.weights[i] * std::sin(M_PI * x / spec.d) * row;
    }
    ss *= h * h;
    return cov.longitudinal.fourier(arg) * ss /
           (4.0 * (n2 - 1.0) * spec.d * spec.d * denom);
}

namespace {

// 1D conservative operator on M cell centers u_i = (i+1/2)/M:
// Neumann (zero flux) at u=0, Dirichlet by ghost reflection at u=1.
Eigen::MatrixXd assemble_h1(const std::function<double(double)>& g, int m) {
    const double h = 1.0 / m;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) {
        const double gf = g((i + 1) * h); // interior face
        a(i, i) -= gf / (h * h);
        a(i, i + 1) += gf / (h * h);
        a(i + 1, i + 1) -= gf / (h * h);
        a(i + 1, i) += gf / (h * h);
    }
    const double g1 = g(1.0);
    a(m - 1, m - 1) -= 2.0 * g1 / (h * h); // ghost value -phi_{M-1}
    return a;
}

struct Solve1D {
    double lambda = 0.0;
    Eigen::VectorXd phi;
};

Solve1D solve_h1(const std::function<double(double)>& g, int m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_h1(g, m));
    Solve1D out;
    out.lambda = -es.eigenvalues()(m - 1);
    out.phi = es.eigenvectors().col(m - 1);
    Eigen::Index imax;
    out.phi.cwiseAbs().maxCoeff(&imax);
    if (out.phi(imax) < 0.0) out.phi = -out.phi;
    // unit discrete L2 norm: h sum phi^2 = 1
    out.phi /= std::sqrt(out.phi.squaredNorm() / m);
    return out;
}

} // namespace

Sturm1DResult h1_eigenproblem(const ContinuumModel& model) {
    if (model.grid < 16)
        throw invalid_argument_error("h1_eigenproblem: grid must be >= 16");
    const Solve1D coarse = solve_h1(model.gamma_inf, model.grid);
    const Solve1D fine = solve_h1(model.gamma_inf, 2 * model.grid);
    Sturm1DResult out;
    out.grid = model.grid;
    out.eigenvalue = coarse.lambda;
    out.richardson = (4.0 * fine.lambda - coarse.lambda) / 3.0;
    out.phi = coarse.phi;
    return out;
}

double variational_lambda(const ContinuumModel& model,
                          const std::function<double(double)>& f,
                          const std::function<double(double)>& df) {
    double scale = 0.0;
    for (int i = 0; i <= 16; ++i)
        scale = std::max(scale, std::abs(f(i / 16.0)));
    if (scale == 0.0)
        throw invalid_argument_error("variational_lambda: trial is zero");
    // phi(1) = 0 is essential (without it the infimum collapses to zero);
    // the Neumann condition at 0 is natural and is not imposed on trials
    if (std::abs(f(1.0)) > 1e-8 * scale)
        throw invalid_argument_error(
            "variational_lambda: trial violates phi(1) = 0");
    const double num = integrate_panels(
        [&](double u) {
            const double d = df(u);
            return model.gamma_inf(u) * d * d;
        },
        0.0, 1.0, 64, 16);
    const double den = integrate_panels(
        [&](double u) {
            const double v = f(u);
            return v * v;
        },
        0.0, 1.0, 64, 16);
    return num / den;
}

namespace {

// Lower-banded SPD matrix with Cholesky factorization in place.
class BandedSpd {
public:
    BandedSpd(int n, int bw) : n_(n), bw_(bw), a_(static_cast<size_t>(n) * (bw + 1), 0.0) {}

    // c <= r, r - c <= bw
    double& at(int r, int c) { return a_[static_cast<size_t>(r) * (bw_ + 1) + (c - r + bw_)]; }
    double at(int r, int c) const {
        return a_[static_cast<size_t>(r) * (bw_ + 1) + (c - r + bw_)];
    }

    void add(int r, int c, double v) {
        if (c > r) std::swap(r, c);
        if (r - c > bw_) throw error("BandedSpd: entry outside band");
        at(r, c) += v;
    }

    void factorize() {
        for (int r = 0; r < n_; ++r) {
            const int c0 = std::max(0, r - bw_);
            for (int c = c0; c <= r; ++c) {
                double s = at(r, c);
                const int k0 = std::max(c0, c - bw_ < 0 ? 0 : c - bw_);
                for (int k = k0; k < c; ++k) s -= at(r, k) * at(c, k);
                if (c < r) {
                    at(r, c) = s / at(c, c);
                } else {
                    if (s <= 0.0)
                        throw spectral_error(
                            "banded Cholesky: matrix is not positive definite");
                    at(r, r) = std::sqrt(s);
                }
            }
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd y(n_);
        for (int r = 0; r < n_; ++r) {
            double s = b(r);
            for (int c = std::max(0, r - bw_); c < r; ++c) s -= at(r, c) * y(c);
            y(r) = s / at(r, r);
        }
        Eigen::VectorXd x(n_);
        for (int r = n_ - 1; r >= 0; --r) {
            double s = y(r);
            const int cmax = std::min(n_ - 1, r + bw_);
            for (int c = r + 1; c <= cmax; ++c) s -= at(c, r) * x(c);
            x(r) = s / at(r, r);
        }
        return x;
    }

private:
    int n_, bw_;
    std::vector<double> a_;
};

// Smallest eigenvalue of the SPD operator represented by the factorized
// band matrix, by inverse power iteration. The Rayleigh quotient is read
// off the solve itself: if A y = x then y'Ay/y'y = y'x/y'y.
double smallest_eigenvalue(const BandedSpd& chol, int n) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(n));
    double prev = 0.0;
    for (int it = 0; it < 400; ++it) {
        Eigen::VectorXd y = chol.solve(x);
        const double mu = y.dot(x) / y.squaredNorm();
        y /= y.norm();
        x = y;
        if (it > 2 && std::abs(mu - prev) <= 1e-13 * std::abs(mu)) return mu;
        prev = mu;
    }
    return prev;
}

} // namespace

Sturm2DResult h2_eigenproblem(const ContinuumModel& model) {
    if (model.grid < 16)
        throw invalid_argument_error("h2_eigenproblem: grid must be >= 16");
    const int m = model.grid;
    const double h = 1.0 / m;
    const auto& g = model.gamma_inf;

    Sturm2DResult out;
    out.grid = m;
    const Solve1D one_d = solve_h1(g, m);
    out.mu_tensor = 2.0 * one_d.lambda;
    out.phi = one_d.phi;

    // product eigenvector residual via the 1D operator
    {
        const Eigen::MatrixXd h1 = assemble_h1(g, m);
        const Eigen::VectorXd r = h1 * one_d.phi + one_d.lambda * one_d.phi;
        double worst = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                worst = std::max(std::abs(r(i) * one_d.phi(j) +
                                          one_d.phi(i) * r(j)),
                                 worst);
        out.product_residual = worst;
    }

    // independent square route: assemble -H2 on the M x M grid
    // (lexicographic), banded Cholesky, inverse iteration
    {
        const int n2 = m * m;
        BandedSpd a(n2, m);
        auto id = [m](int i, int j) { return i * m + j; };
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const int row = id(i, j);
                // u-direction faces
                if (i + 1 < m) {
                    const double gf = g((i + 1) * h) / (h * h);
                    a.add(row, row, gf);
                    a.add(row, id(i + 1, j), -gf);
                    // symmetric counterpart accumulates when (i+1,j) is visited
                } else {
                    a.add(row, row, 2.0 * g(1.0) / (h * h));
                }
                if (i > 0) a.add(row, row, g(i * h) / (h * h));
                // v-direction faces
                if (j + 1 < m) {
                    const double gf = g((j + 1) * h) / (h * h);
                    a.add(row, row, gf);
                    a.add(row, id(i, j + 1), -gf);
                } else {
                    a.add(row, row, 2.0 * g(1.0) / (h * h));
                }
                if (j > 0) a.add(row, row, g(j * h) / (h * h));
            }
        }
        a.factorize();
        out.mu_square = smallest_eigenvalue(a, n2);
    }

    // triangle route: cells i <= j, neighbors crossing the diagonal are
    // reflected; the resulting operator is symmetrized by the sqrt of the
    // multiplicity weights (1 on the diagonal cells, 2 off it)
    {
        TriangleIndex idx{m};
        const int nt = idx.size();
        auto weight = [&](int flat) {
            auto [i, j] = idx.unflat(flat);
            return i == j ? 1.0 : 2.0;
        };
        BandedSpd a(nt, m);
        for (int i = 0; i < m; ++i) {
            for (int j = i; j < m; ++j) {
                const int row = idx.flat(i, j);
                auto couple = [&](int ii, int jj, double gf) {
                    // neighbor (ii,jj) in square coordinates
                    if (ii >= m || jj >= m) { // Dirichlet face at 1
                        a.add(row, row, 2.0 * gf);
                        return;
                    }
                    if (ii < 0 || jj < 0) return; // Neumann face at 0
                    a.add(row, row, gf);
                    const int col = idx.flat(ii, jj);
                    if (col < row) {
                        const double w =
                            std::sqrt(weight(row) / weight(col));
                        a.add(row, col, -gf * w);
                    }
                    // col > row handled when that row is assembled;
                    // col == row cannot occur for distinct neighbors
                };
                couple(i + 1, j, g((i + 1) * h) / (h * h));
                couple(i - 1, j, g(i * h) / (h * h));
                couple(i, j + 1, g((j + 1) * h) / (h * h));
                couple(i, j - 1, g(j * h) / (h * h));
            }
        }
        a.factorize();
        out.mu_triangle = smallest_eigenvalue(a, nt);
    }
    return out;
}

namespace {

// Smallest eigenvalue of a dense symmetric positive-definite matrix with
// banded sparsity, via band Cholesky plus inverse iteration. Large
// triangle operators of nearest-neighbor chains land here; the dense
// eigensolver is reserved for desk-scale sizes.
double banded_smallest(const Eigen::MatrixXd& spd) {
    const int n = static_cast<int>(spd.rows());
    int bw = 0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < r; ++c)
            if (spd(r, c) != 0.0) bw = std::max(bw, r - c);
    BandedSpd a(n, bw);
    for (int r = 0; r < n; ++r)
        for (int c = std::max(0, r - bw); c <= r; ++c)
            if (spd(r, c) != 0.0) a.add(r, c, spd(r, c));
    a.factorize();
    return smallest_eigenvalue(a, n);
}

} // namespace

std::vector<ConvergenceRow>
finite_n_convergence(const std::function<double(double)>& gamma_inf,
                     double lambda_absorb, const std::vector<int>& ns) {
    std::vector<ConvergenceRow> rows;
    for (int n : ns) {
        Eigen::MatrixXd gam = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j + 1 < n; ++j) {
            const double g = gamma_inf((j + 0.5) / n);
            gam(j, j + 1) = g;
            gam(j + 1, j) = g;
        }
        for (int j = 0; j < n; ++j) gam(j, j) = -(gam.row(j).sum() - gam(j, j));
        Eigen::VectorXd lam = Eigen::VectorXd::Zero(n);
        lam(n - 1) = lambda_absorb;

        ConvergenceRow row;
        row.n = n;
        Eigen::VectorXd v;
        const int triangle_size = n * (n + 1) / 2;
        if (triangle_size <= 600 || lambda_absorb == 0.0) {
            const SpectralResult sr = growth_rates(gam, lam);
            row.lambda_n = sr.lambda;
            row.mu_n = sr.mu;
            v = sr.V;
        } else {
            Eigen::MatrixXd a = gam;
            a.diagonal() -= lam;
            const PerronPair pa = perron_pair(a);
            row.lambda_n = -pa.value;
            v = pa.vector;
            const TriangleOperator op = assemble_triangle(gam, lam);
            row.mu_n = banded_smallest(-op.generator());
        }
        row.gap = row.mu_n - 2.0 * row.lambda_n;
        row.gap_rel = std::abs(row.gap) / row.lambda_n;
        row.lambda_scaled = row.lambda_n * n * n;
        // compare the Perron profile with the continuum eigenvector
        ContinuumModel model{gamma_inf, std::max(64, 2 * n)};
        const Sturm1DResult cont = h1_eigenproblem(model);
        double dev = 0.0;
        v /= std::sqrt(v.squaredNorm() / n);
        for (int j = 0; j < n; ++j) {
            const double u = (j + 0.5) / n;
            const int cell = std::min(cont.grid - 1,
                                      static_cast<int>(u * cont.grid));
            dev = std::max(dev, std::abs(v(j) - cont.phi(cell)));
        }
        row.profile_dev = dev;
        rows.push_back(row);
    }
    return rows;
}

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw error("cannot open " + path);
    f << "# schema=rwg.continuum.convergence.v1\n";
    f << "N,lambda_N,mu_N,gap_N,gap_rel,lambda_N_scaled,profile_dev\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf,
                      "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n,
                      r.lambda_n, r.mu_n, r.gap, r.gap_rel, r.lambda_scaled,
                      r.profile_dev);
        f << buf;
    }
}

} // namespace rwg

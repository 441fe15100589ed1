// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Exits nonzero if any criterion fails. All tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rwg/continuum.hpp"
#include "rwg/coupling.hpp"
#include "rwg/moments.hpp"
#include "rwg/montecarlo.hpp"
#include "rwg/quadrature.hpp"
#include "rwg/spectral.hpp"
#include "rwg/waveguide.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

int g_failures = 0;

struct Criterion {
    std::string detail;
    bool pass = true;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

void report(int number, const std::string& name, const Criterion& c,
            double seconds) {
    std::printf("%s criterion %2d: %s (%.2f s)%s%s\n",
                c.pass ? "PASS" : "FAIL", number, name.c_str(), seconds,
                c.detail.empty() ? "" : " -- ", c.detail.c_str());
    if (!c.pass) ++g_failures;
}

template <typename Fn>
void run(int number, const std::string& name, Fn fn,
         double time_limit = 0.0) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fn(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (time_limit > 0.0)
        c.require(dt < time_limit, "runtime " + std::to_string(dt) +
                                       " s exceeds " +
                                       std::to_string(time_limit) + " s");
    report(number, name, c, dt);
}

MatrixXd random_generator(int n, std::mt19937& rng, double lo = 0.1,
                          double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g(i, j) = g(j, i) = u(rng);
    for (int i = 0; i < n; ++i) {
        g(i, i) = 0.0;
        g(i, i) = -g.row(i).sum();
    }
    return g;
}

MatrixXd constant_gamma(int n, double g) {
    MatrixXd m = MatrixXd::Constant(n, n, g);
    for (int j = 0; j < n; ++j) m(j, j) = -(n - 1) * g;
    return m;
}

// pole-free dispersion functions (as in the solver) for the residual check
double disp_f(int j, double s, double V) {
    const double z = std::sqrt(std::max(V * V - s * s, 0.0));
    if (j % 2 == 0) return s * std::sin(0.5 * s) - std::cos(0.5 * s) * z;
    return std::sin(0.5 * s) * z + s * std::cos(0.5 * s);
}

double disp_df(int j, double s, double V) {
    const double h = 1e-6 * std::max(1.0, s);
    return (disp_f(j, s + h, V) - disp_f(j, s - h, V)) / (2.0 * h);
}

// overlap by composite quadrature over the core plus exact tails
double overlap(const rwg::ModeBasis& basis, int i, int j) {
    const auto& spec = basis.spec();
    const int panels =
        static_cast<int>(std::ceil(spec.v_number() / M_PI)) + 2;
    const double core = rwg::integrate_panels(
        [&](double x) { return basis.eval(i, x) * basis.eval(j, x); },
        -0.5 * spec.d, 0.5 * spec.d, panels, 12);
    const auto &mi = basis.mode(i), &mj = basis.mode(j);
    const double bi = basis.eval(i, 0.5 * spec.d);
    const double bj = basis.eval(j, 0.5 * spec.d);
    const double tail = bi * bj * spec.d / (mi.zeta + mj.zeta);
    return core + ((mi.j + mj.j) % 2 == 0 ? 2.0 : 0.0) * tail;
}

void criterion_mode_solver(Criterion& c) {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> un(1.01, 3.0), ukd(1.0, 50.0);
    int count_checked = 0, count_matches = 0;
    double worst_resid = 0.0, worst_ortho = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        rwg::WaveguideSpec spec;
        spec.n = un(rng);
        spec.d = 1.0;
        spec.k = ukd(rng);
        const double V = spec.v_number();
        const rwg::ModeBasis basis(spec);
        for (int j = 0; j < basis.size(); ++j) {
            const auto& m = basis.mode(j);
            c.require(m.sigma > m.j * M_PI && m.sigma < (m.j + 1) * M_PI,
                      "sigma outside its bracket");
            const double resid =
                std::abs(disp_f(m.j, m.sigma, V) / disp_df(m.j, m.sigma, V));
            worst_resid = std::max(worst_resid, resid);
        }
        for (int i = 0; i < basis.size(); ++i)
            for (int j = i; j < basis.size(); ++j)
                worst_ortho = std::max(
                    worst_ortho,
                    std::abs(overlap(basis, i, j) - (i == j ? 1.0 : 0.0)));
        const double frac = std::abs(V / M_PI - std::round(V / M_PI)) * M_PI;
        if (frac >= 0.05) {
            ++count_checked;
            if (basis.n_roots() ==
                static_cast<int>(std::floor(V / M_PI)))
                ++count_matches;
        }
    }
    c.require(worst_resid < 1e-12, "dispersion residual " +
                                       std::to_string(worst_resid));
    c.require(worst_ortho < 1e-8,
              "orthonormality error " + std::to_string(worst_ortho));
    c.require(count_matches == count_checked,
              "N_roots = floor(V/pi) holds in " +
                  std::to_string(count_matches) + "/" +
                  std::to_string(count_checked) +
                  " specs away from cutoffs (observed count is "
                  "floor(V/pi)+1: each partial bracket holds a genuine "
                  "root; see the notes in README)");
}

void criterion_equipartition(Criterion& c) {
    std::mt19937 rng(102);
    std::uniform_int_distribution<int> un(2, 10);
    std::uniform_real_distribution<double> ua(0.2, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = un(rng);
        const MatrixXd gamma = random_generator(n, rng);
        VectorXd a(n);
        for (int j = 0; j < n; ++j) a(j) = ua(rng);
        const VectorXd zero = VectorXd::Zero(n);
        const auto sr = rwg::growth_rates(gamma, zero);
        const double z =
            50.0 / std::min(sr.separation_mean, sr.separation_second);
        const VectorXd q = rwg::propagate_mean(gamma, zero, a.array().square(), z);
        const double target = a.array().square().sum() / n;
        for (int j = 0; j < n; ++j)
            c.require(std::abs(q(j) - target) < 1e-8, "mean equipartition");
        const auto op = rwg::assemble_triangle(gamma, zero);
        const VectorXd s = rwg::propagate_second(op, rwg::initial_second(a), z);
        const double flat = 2.0 * std::pow(a.array().square().sum(), 2) /
                            (n * (n + 1.0));
        for (int i = 0; i < s.size(); ++i)
            c.require(std::abs(s(i) - flat) < 1e-8, "second-moment flat limit");
    }
}

void criterion_growth_inequality(Criterion& c) {
    std::mt19937 rng(103);
    std::uniform_int_distribution<int> un(2, 12);
    std::uniform_real_distribution<double> ul(0.0, 1.0);
    double worst = -1e300;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = un(rng);
        const MatrixXd gamma = random_generator(n, rng);
        VectorXd lam(n);
        for (int j = 0; j < n; ++j) lam(j) = ul(rng);
        const auto sr = rwg::growth_rates(gamma, lam);
        worst = std::max(worst, sr.gap);
    }
    c.require(worst <= 1e-10, "max gap " + std::to_string(worst));
}

void criterion_weak_dissipation(Criterion& c) {
    const int n = 6;
    const double g = 0.8;
    const MatrixXd gamma = constant_gamma(n, g);
    VectorXd lam1(n);
    lam1 << 0.9, 0.3, 0.6, 1.2, 0.45, 0.75;
    const std::vector<double> thetas = {1e-2, 5e-3, 2.5e-3};
    std::vector<double> errs;
    for (double th : thetas) {
        const auto ex = rwg::weak_dissipation_expansion(gamma, lam1, th);
        const auto sr = rwg::growth_rates(gamma, th * lam1);
        errs.push_back(std::abs(sr.lambda - ex.lambda_predicted()));
    }
    const double slope =
        std::log(errs[0] / errs[2]) / std::log(thetas[0] / thetas[2]);
    c.require(std::abs(slope - 3.0) <= 0.3,
              "log-log slope " + std::to_string(slope));
    const double th = 1e-2;
    const auto sr = rwg::growth_rates(gamma, th * lam1);
    const double mean1 = lam1.mean();
    const double gap_formula = -2.0 * th * th /
                               (n * n * (n + 1.0) * g) *
                               (lam1.array() - mean1).square().sum();
    c.require(std::abs(sr.gap - gap_formula) <= 0.05 * std::abs(gap_formula),
              "gap vs closed form: " + std::to_string(sr.gap) + " vs " +
                  std::to_string(gap_formula));
}

void criterion_weak_coupling(Criterion& c) {
    VectorXd lam(5);
    lam << 0.7, 0.25, 0.9, 0.5, 1.1;
    std::mt19937 rng(104);
    const MatrixXd g1 = random_generator(5, rng);
    const std::vector<double> thetas = {1e-2, 5e-3, 2.5e-3};
    std::vector<double> errs;
    for (double th : thetas) {
        const auto ex = rwg::weak_coupling_expansion(lam, g1, th);
        c.require(ex.lambda0 == lam.minCoeff(), "lambda0 = min exactly");
        const auto sr = rwg::growth_rates(th * g1, lam);
        errs.push_back(std::abs(sr.lambda - ex.lambda_predicted()));
    }
    const double slope =
        std::log(errs[0] / errs[2]) / std::log(thetas[0] / thetas[2]);
    c.require(std::abs(slope - 3.0) <= 0.3,
              "log-log slope " + std::to_string(slope));
}

void criterion_continuum_constant(Criterion& c) {
    rwg::ContinuumModel model{[](double) { return 1.0; }, 256};
    const auto r = rwg::h1_eigenproblem(model);
    const double exact = M_PI * M_PI / 4.0;
    c.require(std::abs(r.eigenvalue - exact) < 1e-4,
              "eigenvalue error " + std::to_string(r.eigenvalue - exact));
    c.require(std::abs(r.richardson - exact) < 1e-6,
              "Richardson error " + std::to_string(r.richardson - exact));
    double worst = 0.0;
    for (int i = 0; i < model.grid; ++i) {
        const double u = (i + 0.5) / model.grid;
        worst = std::max(worst, std::abs(r.phi(i) - std::sqrt(2.0) *
                                                        std::cos(0.5 * M_PI * u)));
    }
    c.require(worst < 1e-3, "eigenvector max-norm error " + std::to_string(worst));
}

void criterion_mu_equals_2lambda(Criterion& c) {
    rwg::WaveguideSpec spec;
    spec.n = 2.0;
    spec.d = 1.0;
    spec.k = 10.0;
    const auto cov = rwg::CovarianceModel::type_two(
        rwg::Kernel1D{rwg::KernelFamily::gaussian, 1.0, 1.5});
    // the discretization samples fluxes on the closed interval; gamma_inf
    // extends continuously to the endpoints
    auto type2 = [spec, cov](double u) {
        return rwg::gamma_infinity(std::clamp(u, 1e-9, 1.0 - 1e-9), spec, cov);
    };
    const std::vector<std::pair<std::string, std::function<double(double)>>>
        profiles = {{"constant", [](double) { return 1.0; }},
                    {"type II", type2}};
    for (const auto& [name, ginf] : profiles) {
        rwg::ContinuumModel m256{ginf, 256};
        const auto h1 = rwg::h1_eigenproblem(m256);
        const auto h2 = rwg::h2_eigenproblem(m256);
        const double rel =
            std::abs(h2.mu_square - 2.0 * h1.eigenvalue) / h1.eigenvalue;
        c.require(rel < 1e-6, name + ": |mu - 2 lambda|/lambda = " +
                                  std::to_string(rel));
        // triangle vs square within twice the measured discretization error
        rwg::ContinuumModel m128{ginf, 128};
        const auto h2c = rwg::h2_eigenproblem(m128);
        const double disc = std::abs(h2.mu_square - h2c.mu_square);
        c.require(std::abs(h2.mu_triangle - h2.mu_square) <=
                      2.0 * std::max(disc, 1e-12 * h2.mu_square),
                  name + ": triangle/square disagreement");
    }
}

void criterion_finite_n_gap(Criterion& c) {
    const auto rows = rwg::finite_n_convergence([](double) { return 1.0; }, 1.0,
                                                {8, 16, 32, 64});
    for (size_t i = 1; i < rows.size(); ++i)
        c.require(rows[i].gap_rel < rows[i - 1].gap_rel,
                  "gap ratio not decreasing at N=" + std::to_string(rows[i].n));
    c.require(rows.back().gap_rel < 0.02,
              "gap ratio at N=64: " + std::to_string(rows.back().gap_rel));
}

void criterion_fk_oracles(Criterion& c) {
    std::mt19937 rng(105);
    std::uniform_int_distribution<int> un(2, 5);
    std::uniform_real_distribution<double> ua(0.2, 1.0), ul(0.0, 0.5);
    int within = 0, total = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = un(rng);
        const MatrixXd gamma = random_generator(n, rng, 0.2, 1.0);
        VectorXd lam(n), a(n);
        for (int j = 0; j < n; ++j) {
            lam(j) = ul(rng);
            a(j) = ua(rng);
        }
        rwg::McConfig cfg;
        cfg.paths = 100000;
        cfg.seed = 9000 + trial;
        cfg.workers = 4;
        const double z = 1.0;
        const auto q_mc = rwg::fk_mean_power(gamma, lam, a, z, cfg);
        const VectorXd q = rwg::propagate_mean(gamma, lam, a.array().square(), z);
        for (int j = 0; j < n; ++j) {
            ++total;
            if (std::abs(q_mc.mean(j) - q(j)) <= 3.0 * q_mc.std_error(j))
                ++within;
        }
        const auto s_mc = rwg::fk_second_moment(gamma, lam, a, z, cfg);
        const auto op = rwg::assemble_triangle(gamma, lam);
        const VectorXd s = rwg::propagate_second(op, rwg::initial_second(a), z);
        for (int i = 0; i < s.size(); ++i) {
            ++total;
            if (std::abs(s_mc.mean(i) - s(i)) <= 3.0 * s_mc.std_error(i))
                ++within;
        }
        if (trial == 0) {
            const auto q_mc2 = rwg::fk_mean_power(gamma, lam, a, z, cfg);
            c.require((q_mc.mean - q_mc2.mean).cwiseAbs().maxCoeff() == 0.0,
                      "bit-identical rerun");
        }
    }
    const double frac = static_cast<double>(within) / total;
    c.note("within 3 sigma: " + std::to_string(within) + "/" +
           std::to_string(total));
    c.require(frac >= 0.98, "fraction " + std::to_string(frac));
}

void criterion_sde_oracle(Criterion& c) {
    // N=2 and N=3 agreement at the pinned settings
    for (int n : {2, 3}) {
        std::mt19937 rng(200 + n);
        const MatrixXd gamma = random_generator(n, rng, 0.3, 0.9);
        const VectorXd lam = VectorXd::LinSpaced(n, 0.1, 0.4);
        rwg::CouplingSet cs;
        cs.gamma = gamma;
        cs.gamma_s = MatrixXd::Zero(n, n);
        cs.gamma1 = 0.2 * MatrixXd::Identity(n, n);
        cs.lambda = lam;
        cs.lambda_s = VectorXd::Zero(n);
        cs.kappa = VectorXd::Zero(n);
        VectorXd a = VectorXd::LinSpaced(n, 0.5, 0.9);
        rwg::McConfig cfg;
        cfg.paths = 10000;
        cfg.seed = 77 + n;
        cfg.dz = 1e-3;
        cfg.z_max = 0.5;
        cfg.workers = 4;
        const auto res = rwg::simulate_sde(cs, a, cfg, {0.5});
        const VectorXd q = rwg::propagate_mean(gamma, lam, a.array().square(), 0.5);
        const auto op = rwg::assemble_triangle(gamma, lam);
        const VectorXd s = rwg::propagate_second(op, rwg::initial_second(a), 0.5);
        const auto& ck = res.checkpoints[0];
        for (int j = 0; j < n; ++j)
            c.require(std::abs(ck.mean_power.mean(j) - q(j)) <=
                          3.0 * ck.mean_power.std_error(j),
                      "N=" + std::to_string(n) + " mean power");
        for (int i = 0; i < s.size(); ++i)
            c.require(std::abs(ck.second_moment.mean(i) - s(i)) <=
                          3.0 * ck.second_moment.std_error(i),
                      "N=" + std::to_string(n) + " second moments");
    }
    // weak order >= 1: halving dz halves the measured bias (N=2, strong
    // coupling so the bias dominates the monte-carlo noise)
    {
        const int n = 2;
        MatrixXd gamma(2, 2);
        gamma << -1.0, 1.0, 1.0, -1.0;
        rwg::CouplingSet cs;
        cs.gamma = gamma;
        cs.gamma_s = MatrixXd::Zero(n, n);
        cs.gamma1 = MatrixXd::Zero(n, n);
        cs.lambda = VectorXd::Zero(n);
        cs.lambda_s = VectorXd::Zero(n);
        cs.kappa = VectorXd::Zero(n);
        VectorXd a(2);
        a << 1.0, 0.2;
        const double z = 0.5;
        const VectorXd q = rwg::propagate_mean(gamma, cs.lambda,
                                               a.array().square(), z);
        auto bias_at = [&](double dz) {
            rwg::McConfig cfg;
            cfg.paths = 400000;
            cfg.seed = 5150;
            cfg.dz = dz;
            cfg.z_max = z;
            cfg.workers = 4;
            const auto res = rwg::simulate_sde(cs, a, cfg, {z});
            return (res.checkpoints[0].mean_power.mean - q).norm();
        };
        const double b1 = bias_at(0.02);
        const double b2 = bias_at(0.01);
        c.note("bias(0.02)=" + std::to_string(b1) + " bias(0.01)=" +
               std::to_string(b2));
        c.require(b2 < 0.7 * b1 && b2 > 0.3 * b1,
                  "halving dz does not halve the bias");
    }
    // N=1 closed form with relative bias < 2 dz Lambda_0
    {
        rwg::CouplingSet cs;
        cs.gamma = MatrixXd::Zero(1, 1);
        cs.gamma_s = MatrixXd::Zero(1, 1);
        cs.gamma1 = 0.3 * MatrixXd::Identity(1, 1);
        cs.lambda = VectorXd::Constant(1, 1.0);
        cs.lambda_s = VectorXd::Constant(1, 0.2);
        cs.kappa = VectorXd::Constant(1, 0.1);
        const VectorXd a = VectorXd::Constant(1, 0.9);
        rwg::McConfig cfg;
        cfg.paths = 50000;
        cfg.seed = 31337;
        cfg.dz = 1e-2;
        cfg.z_max = 1.0;
        cfg.workers = 4;
        const auto res = rwg::simulate_sde(cs, a, cfg, {1.0});
        const double truth = 0.81 * std::exp(-1.0);
        const double rel =
            std::abs(res.checkpoints[0].mean_power.mean(0) - truth) / truth;
        c.require(rel < 2.0 * cfg.dz * 1.0,
                  "N=1 closed-form relative bias " + std::to_string(rel));
    }
}

void criterion_scintillation(Criterion& c) {
    // no dissipation: ratio -> 2N/(N+1)
    rwg::WaveguideSpec spec;
    spec.n = 2.0;
    spec.d = 1.0;
    spec.k = 10.0;
    spec.x_s = 0.07;
    const rwg::ModeBasis basis(spec);
    const int n = basis.size();
    std::mt19937 rng(106);
    const MatrixXd gamma = random_generator(n, rng);
    const auto amps = rwg::source_amplitudes(basis);
    const VectorXd a = Eigen::Map<const VectorXd>(amps.data(), n);
    const auto sr0 = rwg::growth_rates(gamma, VectorXd::Zero(n));
    const auto sc = rwg::scintillation_ratio(basis, sr0, a, 0.1, 5.0);
    c.require(std::abs(sc.ratio - 2.0 * n / (n + 1.0)) < 1e-6,
              "ratio " + std::to_string(sc.ratio) + " vs " +
                  std::to_string(2.0 * n / (n + 1.0)));

    // weak dissipation: measured growth exponent of m4/m2^2 over a decade
    // of z equals -(mu - 2 lambda) within 1%
    const int m = 4;
    const MatrixXd gc = constant_gamma(m, 1.0);
    VectorXd lam1(m);
    lam1 << 1.0, 0.2, 0.6, 0.4;
    const double th = 0.05;
    const VectorXd lam = th * lam1;
    const auto sr = rwg::growth_rates(gc, lam);
    const auto op = rwg::assemble_triangle(gc, lam);
    VectorXd am = VectorXd::Constant(m, 1.0);
    const VectorXd q0 = rwg::initial_mean(am);
    const VectorXd s0 = rwg::initial_second(am);
    auto ratio_at = [&](double z) {
        const VectorXd q = rwg::propagate_mean(gc, lam, q0, z);
        const VectorXd s = rwg::propagate_second(op, s0, z);
        double m2 = 0.0, m4 = 0.0;
        for (int j = 0; j < m; ++j) m2 += q(j);
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l) m4 += s(op.idx.flat(j, l));
        return m4 / (m2 * m2);
    };
    const double z0 = 40.0, z1 = 400.0;
    const double slope =
        (std::log(ratio_at(z1)) - std::log(ratio_at(z0))) / (z1 - z0);
    const double expected = -sr.gap;
    c.require(std::abs(slope - expected) < 0.01 * expected,
              "measured exponent " + std::to_string(slope) + " vs " +
                  std::to_string(expected));
    c.require(expected > 0.0, "exponent must be positive here");
}

} // namespace

int main() {
    std::printf("# acceptance criteria\n");
    run(1, "mode solver randomized battery", criterion_mode_solver, 10.0);
    run(2, "equipartition without dissipation", criterion_equipartition);
    run(3, "growth-rate inequality mu <= 2 lambda", criterion_growth_inequality,
        30.0);
    run(4, "weak-dissipation expansion order and gap", criterion_weak_dissipation);
    run(5, "weak-coupling expansion order", criterion_weak_coupling);
    run(6, "continuum constant case", criterion_continuum_constant);
    run(7, "mu = 2 lambda identity", criterion_mu_equals_2lambda);
    run(8, "finite-N gap vanishing", criterion_finite_n_gap);
    run(9, "Feynman-Kac oracle agreement", criterion_fk_oracles, 120.0);
    run(10, "SDE oracle agreement", criterion_sde_oracle);
    run(11, "scintillation ratio and growth exponent", criterion_scintillation);
    if (g_failures > 0) {
        std::printf("# %d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("# all criteria passed\n");
    return 0;
}

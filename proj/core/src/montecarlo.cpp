#include "rwg/montecarlo.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rwg/moments.hpp"
#include "rwg/philox.hpp"

namespace rwg {

void McConfig::validate() const {
    if (paths < 100)
        throw invalid_argument_error(
            "mc.paths must be >= 100 for any reported estimate");
    if (!(dz > 0.0)) throw invalid_argument_error("mc.dz must be > 0");
    if (!(z_max >= 0.0)) throw invalid_argument_error("mc.z_max must be >= 0");
    if (workers < 1) throw invalid_argument_error("mc.workers must be >= 1");
}

std::string McEstimate::to_json() const {
    nlohmann::json doc;
    doc["schema"] = "rwg.mc_estimate.v1";
    doc["paths"] = paths_used;
    doc["mean"] = std::vector<double>(mean.data(), mean.data() + mean.size());
    doc["std_error"] = std::vector<double>(std_error.data(),
                                           std_error.data() + std_error.size());
    return doc.dump(2);
}

namespace {

constexpr long long kBlock = 1024; // fixed partial-sum block (determinism)

struct Accumulator {
    Eigen::VectorXd sum;
    Eigen::VectorXd sumsq;
    explicit Accumulator(int n)
        : sum(Eigen::VectorXd::Zero(n)), sumsq(Eigen::VectorXd::Zero(n)) {}
    void add(const Accumulator& o) {
        sum += o.sum;
        sumsq += o.sumsq;
    }
};

McEstimate finalize(const Accumulator& acc, long long paths) {
    const int n = static_cast<int>(acc.sum.size());
    McEstimate est;
    est.paths_used = paths;
    est.mean = acc.sum / static_cast<double>(paths);
    est.std_error.resize(n);
    for (int i = 0; i < n; ++i) {
        const double var =
            std::max(0.0, (acc.sumsq(i) - acc.sum(i) * acc.sum(i) / paths) /
                              (paths - 1));
        est.std_error(i) = std::sqrt(var / paths);
    }
    return est;
}

// Partition paths into fixed blocks, process them possibly in parallel,
// merge partials in block order so the result is worker-count independent.
template <typename BlockFn>
McEstimate run_blocks(int dim, const McConfig& cfg, const BlockFn& block_fn) {
    const long long nblocks = (cfg.paths + kBlock - 1) / kBlock;
    std::vector<Accumulator> partials(nblocks, Accumulator(dim));
    const int workers =
        static_cast<int>(std::min<long long>(cfg.workers, nblocks));
    if (workers <= 1) {
        for (long long b = 0; b < nblocks; ++b) block_fn(b, partials[b]);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (long long b = w; b < nblocks; b += workers)
                    block_fn(b, partials[b]);
            });
        }
        for (auto& t : pool) t.join();
    }
    Accumulator total(dim);
    for (const auto& p : partials) total.add(p);
    return finalize(total, cfg.paths);
}

// One killed jump path: generator rows (off-diagonal rates), kill rates,
// payoff at the final state, replayed from a fixed stream.
double killed_jump_path(const Eigen::MatrixXd& gen,
                        const Eigen::VectorXd& kill,
                        const Eigen::VectorXd& payoff, int start, double z,
                        RandomStream& stream) {
    int state = start;
    double t = 0.0;
    double logw = 0.0;
    const int n = static_cast<int>(kill.size());
    for (;;) {
        const double rate = -gen(state, state);
        double tau;
        if (rate <= 0.0)
            tau = z - t; // absorbing pattern: sit out the remainder
        else
            tau = stream.exponential() / rate;
        if (t + tau >= z) {
            logw -= kill(state) * (z - t);
            break;
        }
        logw -= kill(state) * tau;
        t += tau;
        // next state proportional to the off-diagonal rates
        double u = stream.uniform() * rate;
        int next = -1;
        for (int l = 0; l < n; ++l) {
            if (l == state) continue;
            u -= gen(state, l);
            if (u <= 0.0) {
                next = l;
                break;
            }
        }
        if (next < 0) { // rounding residue: take the last positive rate
            for (int l = n - 1; l >= 0; --l) {
                if (l != state && gen(state, l) > 0.0) {
                    next = l;
                    break;
                }
            }
        }
        state = next < 0 ? state : next;
    }
    return payoff(state) * std::exp(logw);
}

void check_generator(const Eigen::MatrixXd& gen) {
    const int n = static_cast<int>(gen.rows());
    const double scale = std::max(1.0, gen.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            row += gen(i, j);
            if (j != i && gen(i, j) < -1e-12 * scale)
                throw invalid_argument_error(
                    "jump generator has a negative off-diagonal rate");
        }
        if (std::abs(row) > 1e-10 * scale)
            throw invalid_argument_error("jump generator row sums are not zero");
    }
}

McEstimate fk_estimate(const Eigen::MatrixXd& gen, const Eigen::VectorXd& kill,
                       const Eigen::VectorXd& payoff, double z,
                       const McConfig& cfg) {
    cfg.validate();
    check_generator(gen);
    const int dim = static_cast<int>(kill.size());
    return run_blocks(dim, cfg, [&](long long b, Accumulator& acc) {
        const long long p0 = b * kBlock;
        const long long p1 = std::min(cfg.paths, p0 + kBlock);
        for (long long p = p0; p < p1; ++p) {
            for (int j = 0; j < dim; ++j) {
                // common random numbers: the same per-path stream is
                // replayed for every start index
                RandomStream stream(cfg.seed, static_cast<std::uint64_t>(p));
                const double v =
                    killed_jump_path(gen, kill, payoff, j, z, stream);
                acc.sum(j) += v;
                acc.sumsq(j) += v * v;
            }
        }
    });
}

} // namespace

McEstimate fk_mean_power(const Eigen::MatrixXd& gamma,
                         const Eigen::VectorXd& lambda,
                         const Eigen::VectorXd& a, double z,
                         const McConfig& cfg) {
    return fk_estimate(gamma, lambda, a.array().square(), z, cfg);
}

McEstimate fk_mean_power(const CouplingSet& coupling, const Eigen::VectorXd& a,
                         double z, const McConfig& cfg) {
    return fk_mean_power(coupling.gamma, coupling.lambda, a, z, cfg);
}

McEstimate fk_second_moment(const Eigen::MatrixXd& gamma,
                            const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& a, double z,
                            const McConfig& cfg) {
    const TriangleOperator op = assemble_triangle(gamma, lambda);
    const int m = op.idx.size();
    Eigen::VectorXd payoff(m);
    for (int i = 0; i < m; ++i) {
        auto [j, l] = op.idx.unflat(i);
        payoff(i) = (j == l ? 1.0 : 2.0) * a(j) * a(j) * a(l) * a(l);
    }
    return fk_estimate(op.theta, op.psi, payoff, z, cfg);
}

McEstimate fk_second_moment(const CouplingSet& coupling,
                            const Eigen::VectorXd& a, double z,
                            const McConfig& cfg) {
    return fk_second_moment(coupling.gamma, coupling.lambda, a, z, cfg);
}

Eigen::MatrixXd fk_mean_power_samples(const Eigen::MatrixXd& gamma,
                                      const Eigen::VectorXd& lambda,
                                      const Eigen::VectorXd& a, double z,
                                      const McConfig& cfg,
                                      long long max_samples) {
    cfg.validate();
    check_generator(gamma);
    const Eigen::VectorXd payoff = a.array().square();
    const long long rows = std::min(cfg.paths, max_samples);
    const int n = static_cast<int>(lambda.size());
    Eigen::MatrixXd out(rows, n);
    for (long long p = 0; p < rows; ++p) {
        for (int j = 0; j < n; ++j) {
            RandomStream stream(cfg.seed, static_cast<std::uint64_t>(p));
            out(p, j) = killed_jump_path(gamma, lambda, payoff, j, z, stream);
        }
    }
    return out;
}

SdeResult simulate_sde(const CouplingSet& coupling, const Eigen::VectorXd& a,
                       const McConfig& cfg,
                       const std::vector<double>& checkpoints,
                       long long sample_paths) {
    cfg.validate();
    const int n = coupling.size();
    const TriangleIndex idx{n};

    double stiff = 0.0;
    for (int j = 0; j < n; ++j)
        stiff = std::max({stiff, std::abs(coupling.gamma(j, j)),
                          coupling.lambda(j), coupling.gamma1(j, j)});
    if (cfg.dz * stiff > 0.05) {
        std::ostringstream msg;
        msg << "simulate_sde: dz * max(|Gamma_jj|, Lambda_j, Gamma1_jj) = "
            << cfg.dz * stiff << " exceeds 0.05";
        throw invalid_argument_error(msg.str());
    }

    // symmetric square root of Gamma1 (Brownian correlation)
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(coupling.gamma1);
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < n; ++i) {
        if (ev(i) < -1e-10)
            throw invalid_argument_error(
                "simulate_sde: Gamma1 is not positive semidefinite");
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    const Eigen::MatrixXd root1 =
        es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();

    // exact integrating factor of the diagonal drift
    std::vector<std::complex<double>> efac(n);
    for (int j = 0; j < n; ++j) {
        const std::complex<double> c(
            0.5 * (coupling.gamma(j, j) - coupling.gamma1(j, j) -
                   coupling.lambda(j)),
            0.5 * (coupling.gamma_s(j, j) - coupling.lambda_s(j) +
                   coupling.kappa(j)));
        efac[j] = std::exp(c * cfg.dz);
    }

    const long long nsteps =
        static_cast<long long>(std::llround(cfg.z_max / cfg.dz));
    // checkpoint step indices (snapped to the grid)
    std::vector<long long> check_steps;
    for (double zc : checkpoints) {
        long long s = std::llround(zc / cfg.dz);
        s = std::max(0ll, std::min(nsteps, s));
        check_steps.push_back(s);
    }

    const int nck = static_cast<int>(check_steps.size());
    const int dim_q = n, dim_s = idx.size();
    const int dim = nck * (dim_q + dim_s);
    const double sdz = std::sqrt(cfg.dz);

    const long long n_samples = std::min(sample_paths, cfg.paths);
    Eigen::MatrixXcd samples(std::max<long long>(n_samples, 0), n);

    McEstimate all = [&] {
        McConfig c2 = cfg;
        return run_blocks(dim, c2, [&](long long b, Accumulator& acc) {
            std::vector<std::complex<double>> amp(n), upd(n);
            Eigen::VectorXd xi(n), w1(n);
            const long long p0 = b * kBlock;
            const long long p1 = std::min(cfg.paths, p0 + kBlock);
            for (long long p = p0; p < p1; ++p) {
                RandomStream stream(cfg.seed,
                                    0x80000000ull + static_cast<std::uint64_t>(p));
                for (int j = 0; j < n; ++j) amp[j] = a(j);
                long long step = 0;
                auto record = [&](int ck) {
                    const int base = ck * (dim_q + dim_s);
                    for (int j = 0; j < n; ++j) {
                        const double pj = std::norm(amp[j]);
                        acc.sum(base + j) += pj;
                        acc.sumsq(base + j) += pj * pj;
                    }
                    for (int j = 0; j < n; ++j) {
                        const double pj = std::norm(amp[j]);
                        for (int l = j; l < n; ++l) {
                            const double v = (j == l ? 1.0 : 2.0) * pj *
                                             std::norm(amp[l]);
                            const int at = base + dim_q + idx.flat(j, l);
                            acc.sum(at) += v;
                            acc.sumsq(at) += v * v;
                        }
                    }
                };
                for (int ck = 0; ck < nck; ++ck) {
                    for (; step < check_steps[ck]; ++step) {
                        // correlated diagonal phases
                        for (int j = 0; j < n; ++j) xi(j) = stream.normal();
                        w1 = root1 * xi;
                        for (int j = 0; j < n; ++j)
                            upd[j] = amp[j] * std::complex<double>(
                                                  1.0, w1(j) * sdz);
                        // pairwise exchange noises
                        for (int j = 0; j < n; ++j) {
                            for (int l = j + 1; l < n; ++l) {
                                const double g =
                                    std::sqrt(0.5 * coupling.gamma(j, l));
                                const double dw = stream.normal() * sdz;
                                const double dwt = stream.normal() * sdz;
                                const std::complex<double> zjl(-dwt, dw);
                                const std::complex<double> zlj(dwt, dw);
                                upd[j] += g * amp[l] * zjl;
                                upd[l] += g * amp[j] * zlj;
                            }
                        }
                        for (int j = 0; j < n; ++j) amp[j] = efac[j] * upd[j];
                    }
                    record(ck);
                }
                if (p < n_samples && nck > 0)
                    for (int j = 0; j < n; ++j) samples(p, j) = amp[j];
            }
        });
    }();

    SdeResult out;
    out.idx = idx;
    out.sample_paths = std::move(samples);
    for (int ck = 0; ck < nck; ++ck) {
        SdeCheckpoint c;
        c.z = check_steps[ck] * cfg.dz;
        const int base = ck * (dim_q + dim_s);
        c.mean_power.paths_used = all.paths_used;
        c.mean_power.mean = all.mean.segment(base, dim_q);
        c.mean_power.std_error = all.std_error.segment(base, dim_q);
        c.second_moment.paths_used = all.paths_used;
        c.second_moment.mean = all.mean.segment(base + dim_q, dim_s);
        c.second_moment.std_error = all.std_error.segment(base + dim_q, dim_s);
        out.checkpoints.push_back(std::move(c));
    }
    return out;
}

} // namespace rwg

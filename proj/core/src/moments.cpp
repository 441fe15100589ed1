#include "rwg/moments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace rwg {

TriangleOperator assemble_triangle(const Eigen::MatrixXd& gamma,
                                   const Eigen::VectorXd& lambda) {
    const int n = static_cast<int>(lambda.size());
    TriangleOperator op;
    op.idx = TriangleIndex{n};
    const int m = op.idx.size();
    op.theta = Eigen::MatrixXd::Zero(m, m);
    op.psi = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < n; ++j) {
        for (int l = j; l < n; ++l) {
            const int row = op.idx.flat(j, l);
            op.psi(row) = lambda(j) + lambda(l);
            if (j != l) {
                // 2 Gamma_jl (S_jj + S_ll - 2 S_jl)
                op.theta(row, op.idx.flat(j, j)) += 2.0 * gamma(j, l);
                op.theta(row, op.idx.flat(l, l)) += 2.0 * gamma(j, l);
                op.theta(row, row) += -4.0 * gamma(j, l);
            }
            for (int m2 = 0; m2 < n; ++m2) {
                if (m2 == j || m2 == l) continue;
                // Gamma_l m (S_jm - S_jl) + Gamma_j m (S_ml - S_jl)
                op.theta(row, op.idx.flat(j, m2)) += gamma(l, m2);
                op.theta(row, op.idx.flat(m2, l)) += gamma(j, m2);
                op.theta(row, row) -= gamma(l, m2) + gamma(j, m2);
            }
        }
    }
    return op;
}

TriangleOperator assemble_triangle(const CouplingSet& coupling) {
    return assemble_triangle(coupling.gamma, coupling.lambda);
}

Eigen::VectorXd initial_mean(const Eigen::VectorXd& a) {
    return a.array().square();
}

Eigen::VectorXd initial_second(const Eigen::VectorXd& a) {
    const int n = static_cast<int>(a.size());
    TriangleIndex idx{n};
    Eigen::VectorXd s0(idx.size());
    for (int j = 0; j < n; ++j)
        for (int l = j; l < n; ++l)
            s0(idx.flat(j, l)) =
                (j == l ? 1.0 : 2.0) * a(j) * a(j) * a(l) * a(l);
    return s0;
}

SymmetricPropagator::SymmetricPropagator(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw spectral_error("symmetric eigendecomposition failed");
    evecs_ = es.eigenvectors();
    evals_ = es.eigenvalues();
}

Eigen::VectorXd SymmetricPropagator::apply(const Eigen::VectorXd& v,
                                           double z) const {
    const Eigen::VectorXd coef = evecs_.transpose() * v;
    return evecs_ * (coef.array() * (evals_.array() * z).exp()).matrix();
}

namespace {

Eigen::VectorXd clamp_nonnegative(Eigen::VectorXd v, int* warnings) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) < 0.0) {
            if (v(i) < -1e-12 && warnings) ++*warnings;
            v(i) = 0.0;
        }
    }
    return v;
}

} // namespace

Eigen::VectorXd propagate_mean(const Eigen::MatrixXd& gamma,
                               const Eigen::VectorXd& lambda,
                               const Eigen::VectorXd& q0, double z,
                               int* clamp_warnings) {
    Eigen::MatrixXd a = gamma;
    a.diagonal() -= lambda;
    SymmetricPropagator prop(a);
    return clamp_nonnegative(prop.apply(q0, z), clamp_warnings);
}

Eigen::VectorXd propagate_mean(const CouplingSet& coupling,
                               const Eigen::VectorXd& q0, double z,
                               int* clamp_warnings) {
    return propagate_mean(coupling.gamma, coupling.lambda, q0, z,
                          clamp_warnings);
}

Eigen::VectorXd propagate_second(const TriangleOperator& op,
                                 const Eigen::VectorXd& s0, double z,
                                 int* clamp_warnings) {
    SymmetricPropagator prop(op.generator());
    return clamp_nonnegative(prop.apply(s0, z), clamp_warnings);
}

IntensityMoments intensity_moments(const ModeBasis& basis,
                                   const SpectralResult& sr,
                                   const Eigen::VectorXd& a, double x,
                                   double z) {
    const int n = basis.size();
    double c_v = 0.0;
    for (int l = 0; l < n; ++l) c_v += sr.V(l) * a(l) * a(l);
    double c_w = 0.0;
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            c_w += sr.W(sr.idx.flat(j, l)) * a(j) * a(j) * a(l) * a(l);

    Eigen::VectorXd w(n); // phi_j(x)^2 / beta_j
    for (int j = 0; j < n; ++j) {
        const double p = basis.eval(j, x);
        w(j) = p * p / basis.mode(j).beta;
    }
    IntensityMoments out;
    for (int j = 0; j < n; ++j) out.m2 += w(j) * sr.V(j);
    out.m2 *= c_v * std::exp(-sr.lambda * z);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            out.m4 += w(j) * w(l) * sr.W(sr.idx.flat(j, l));
    out.m4 *= c_w * std::exp(-sr.mu * z);
    return out;
}

ScintillationRatio scintillation_ratio(const ModeBasis& basis,
                                       const SpectralResult& sr,
                                       const Eigen::VectorXd& a, double x,
                                       double z) {
    const IntensityMoments m = intensity_moments(basis, sr, a, x, z);
    ScintillationRatio out;
    out.ratio = m.m4 / (m.m2 * m.m2);
    out.exponent = -(sr.mu - 2.0 * sr.lambda);
    return out;
}

namespace {

void write_value(std::ofstream& f, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    f << buf;
}

} // namespace

void write_mean_csv(const std::string& path, const std::vector<double>& zs,
                    const std::vector<Eigen::VectorXd>& qs) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw error("cannot open " + path);
    const int n = qs.empty() ? 0 : static_cast<int>(qs.front().size());
    f << "# schema=rwg.moments.mean.v1 n_modes=" << n << "\n";
    f << "z";
    for (int j = 0; j < n; ++j) f << ",Q_" << j;
    f << "\n";
    for (size_t i = 0; i < zs.size(); ++i) {
        write_value(f, zs[i]);
        for (int j = 0; j < n; ++j) {
            f << ",";
            write_value(f, qs[i](j));
        }
        f << "\n";
    }
}

void write_second_csv(const std::string& path, const TriangleIndex& idx,
                      const std::vector<double>& zs,
                      const std::vector<Eigen::VectorXd>& ss) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw error("cannot open " + path);
    f << "# schema=rwg.moments.second.v1 n_modes=" << idx.n
      << " triangle=lexicographic(j<=l)\n";
    f << "z";
    for (int i = 0; i < idx.size(); ++i) {
        auto [j, l] = idx.unflat(i);
        f << ",S_" << j << "_" << l;
    }
    f << "\n";
    for (size_t i = 0; i < zs.size(); ++i) {
        write_value(f, zs[i]);
        for (int c = 0; c < idx.size(); ++c) {
            f << ",";
            write_value(f, ss[i](c));
        }
        f << "\n";
    }
}

} // namespace rwg

#include "rwg/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwg/moments.hpp"

namespace rwg {

namespace {

bool pattern_irreducible(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    if (n <= 1) return true;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u = 0; u < n; ++u) {
            if (u == v || seen[u] || m(v, u) == 0.0) continue;
            seen[u] = 1;
            ++reached;
            stack.push_back(u);
        }
    }
    return reached == n;
}

} // namespace

PerronPair perron_pair(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    if (n < 1) throw spectral_error("perron_pair: empty matrix");
    if (!pattern_irreducible(M))
        throw spectral_error(
            "perron_pair: off-diagonal pattern is reducible (the coupling "
            "graph is not connected)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success)
        throw spectral_error("perron_pair: eigendecomposition failed");
    PerronPair out;
    out.value = es.eigenvalues()(n - 1);
    out.vector = es.eigenvectors().col(n - 1);
    if (n >= 2) {
        out.separation = es.eigenvalues()(n - 1) - es.eigenvalues()(n - 2);
        const double scale =
            std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (out.separation < 1e-12 * scale) {
            std::ostringstream msg;
            msg << "perron_pair: top eigenvalue is degenerate (separation "
                << out.separation << ")";
            throw spectral_error(msg.str());
        }
    } else {
        out.separation = std::numeric_limits<double>::infinity();
    }
    // Perron positivity: flip so the largest-magnitude entry is positive,
    // then clamp rounding-level negatives.
    Eigen::Index imax;
    out.vector.cwiseAbs().maxCoeff(&imax);
    if (out.vector(imax) < 0.0) out.vector = -out.vector;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (out.vector(i) < -1e-10)
            throw spectral_error(
                "perron_pair: eigenvector has a significantly negative "
                "entry; matrix is not a cooperative generator");
        if (out.vector(i) < 0.0) out.vector(i) = 0.0;
    }
    return out;
}

SpectralResult growth_rates(const Eigen::MatrixXd& gamma,
                            const Eigen::VectorXd& lambda) {
    Eigen::MatrixXd a = gamma;
    a.diagonal() -= lambda;
    const PerronPair pa = perron_pair(a);

    const TriangleOperator op = assemble_triangle(gamma, lambda);
    const PerronPair pt = perron_pair(op.generator());

    SpectralResult sr;
    sr.lambda = -pa.value;
    sr.V = pa.vector;
    sr.mu = -pt.value;
    sr.W = pt.vector;
    sr.gap = sr.mu - 2.0 * sr.lambda;
    sr.separation_mean = pa.separation;
    sr.separation_second = pt.separation;
    sr.idx = op.idx;
    if (sr.gap > 1e-10) {
        std::ostringstream msg;
        msg << "growth_rates: mu - 2 lambda = " << sr.gap
            << " > 1e-10 violates the Cauchy-Schwarz bound";
        throw spectral_error(msg.str());
    }
    return sr;
}

SpectralResult growth_rates(const CouplingSet& coupling) {
    return growth_rates(coupling.gamma, coupling.lambda);
}

Eigen::VectorXd asymptotic_mean(const SpectralResult& sr,
                                const Eigen::VectorXd& a, double z) {
    double c_v = 0.0;
    for (Eigen::Index l = 0; l < a.size(); ++l)
        c_v += sr.V(l) * a(l) * a(l);
    return c_v * std::exp(-sr.lambda * z) * sr.V;
}

Eigen::VectorXd asymptotic_second(const SpectralResult& sr,
                                  const Eigen::VectorXd& a, double z) {
    const int n = sr.idx.n;
    double c_w = 0.0;
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            c_w += sr.W(sr.idx.flat(j, l)) * a(j) * a(j) * a(l) * a(l);
    return c_w * std::exp(-sr.mu * z) * sr.W;
}

namespace {

// Least-squares solve M x = rhs restricted to the orthogonal complement of
// the (one-dimensional) kernel of a symmetric singular generator M.
Eigen::VectorXd singular_solve(const Eigen::MatrixXd& m,
                               const Eigen::VectorXd& rhs,
                               const Eigen::VectorXd& kernel_dir) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const int n = static_cast<int>(m.rows());
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd proj = rhs - kernel_dir * kernel_dir.dot(rhs);
    for (int i = 0; i < n; ++i) {
        const double ev = es.eigenvalues()(i);
        if (std::abs(ev) < 1e-12 * scale) continue;
        const Eigen::VectorXd u = es.eigenvectors().col(i);
        x += (u.dot(proj) / ev) * u;
    }
    // gauge: orthogonal to the kernel direction
    x -= kernel_dir * kernel_dir.dot(x);
    return x;
}

} // namespace

ExpansionResult weak_dissipation_expansion(const Eigen::MatrixXd& gamma,
                                           const Eigen::VectorXd& lambda1,
                                           double theta) {
    const int n = static_cast<int>(lambda1.size());
    if (!pattern_irreducible(gamma))
        throw spectral_error("weak_dissipation_expansion: reducible Gamma");
    ExpansionResult r;
    r.theta = theta;
    const Eigen::VectorXd v0 = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(n));
    r.lambda0 = 0.0;
    r.lambda1 = lambda1.mean();
    // Gamma V1 = (diag(Lambda1) - lambda1) V0, V1 orthogonal to V0
    const Eigen::VectorXd rhs =
        (lambda1.array() - r.lambda1).matrix().asDiagonal() * v0;
    r.V1 = singular_solve(gamma, rhs, v0);
    r.lambda2 = v0.dot(lambda1.asDiagonal() * r.V1);

    r.mu0 = 0.0;
    r.mu1 = 2.0 * r.lambda1;
    const TriangleOperator op =
        assemble_triangle(gamma, Eigen::VectorXd::Zero(n));
    const int m = op.idx.size();
    const Eigen::VectorXd w0 =
        Eigen::VectorXd::Constant(m, std::sqrt(2.0 / (n * (n + 1.0))));
    Eigen::VectorXd psi1(m);
    for (int i = 0; i < m; ++i) {
        auto [j, l] = op.idx.unflat(i);
        psi1(i) = lambda1(j) + lambda1(l);
    }
    const Eigen::VectorXd rhs_w =
        ((psi1.array() - r.mu1) * w0.array()).matrix();
    r.W1 = singular_solve(op.theta, rhs_w, w0);
    r.mu2 = w0.dot((psi1.array() * r.W1.array()).matrix());
    return r;
}

ExpansionResult weak_coupling_expansion(const Eigen::VectorXd& lambda,
                                        const Eigen::MatrixXd& gamma1,
                                        double theta) {
    const int n = static_cast<int>(lambda.size());
    Eigen::Index jstar;
    lambda.minCoeff(&jstar);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j != jstar && lambda(j) - lambda(jstar) < 1e-12) {
            std::ostringstream msg;
            msg << "weak_coupling_expansion: dissipation minimum is not "
                   "unique (Lambda_"
                << j << " ties Lambda_" << jstar << " within 1e-12)";
            throw spectral_error(msg.str());
        }
    }
    ExpansionResult r;
    r.theta = theta;
    r.lambda0 = lambda(jstar);
    r.mu0 = 2.0 * lambda(jstar);
    r.V1 = Eigen::VectorXd::Zero(n);
    double l1 = 0.0, l2 = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == jstar) continue;
        const double g = gamma1(j, jstar);
        const double dl = lambda(j) - lambda(jstar);
        l1 += g;
        l2 -= g * g / dl;
        r.V1(j) = g / dl;
    }
    r.lambda1 = l1;
    r.lambda2 = l2;
    r.mu1 = 2.0 * l1;
    r.mu2 = 4.0 * l2;
    // W1 lives on the row/column through (j*, j*)
    const TriangleIndex idx{n};
    r.W1 = Eigen::VectorXd::Zero(idx.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == jstar) continue;
        r.W1(idx.flat(static_cast<int>(j), static_cast<int>(jstar))) =
            2.0 * gamma1(j, jstar) / (lambda(j) - lambda(jstar));
    }
    return r;
}

std::string SpectralResult::to_json() const {
    nlohmann::json doc;
    doc["schema"] = "rwg.spectral.v1";
    doc["lambda"] = lambda;
    doc["mu"] = mu;
    doc["gap"] = gap;
    doc["eigen_separations"] = {{"mean", separation_mean},
                                {"second", separation_second}};
    doc["V"] = std::vector<double>(V.data(), V.data() + V.size());
    doc["W"] = std::vector<double>(W.data(), W.data() + W.size());
    doc["n_modes"] = idx.n;
    return doc.dump(2);
}

} // namespace rwg

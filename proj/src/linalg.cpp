#include "clt/linalg.hpp"

#include <cmath>
#include <string>

namespace clt::linalg {

namespace {

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(who) + ": matrix is " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()) + ", expected square");
    }
}

}  // namespace

bool is_hurwitz(const Matrix& a) {
    require_square(a, "is_hurwitz");
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    return (es.eigenvalues().real().array() < -kHurwitzTol).all();
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
    require_square(a, "solve_lyapunov");
    require_square(q, "solve_lyapunov");
    if (a.rows() != q.rows()) {
        throw DimensionError("solve_lyapunov: A is " + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()) + " but Q is " +
                             std::to_string(q.rows()) + "x" + std::to_string(q.cols()));
    }
    if (!is_hurwitz(a)) {
        throw StabilityError("solve_lyapunov: A is not Hurwitz");
    }

    const Eigen::Index d = a.rows();
    const Matrix eye = Matrix::Identity(d, d);
    Matrix kron(d * d, d * d);
    // I (x) A + A (x) I with column-stacking vec convention.
    for (Eigen::Index bi = 0; bi < d; ++bi) {
        for (Eigen::Index bj = 0; bj < d; ++bj) {
            kron.block(bi * d, bj * d, d, d) = eye(bi, bj) * a + a(bi, bj) * eye;
        }
    }

    Vector rhs(d * d);
    for (Eigen::Index j = 0; j < d; ++j) {
        rhs.segment(j * d, d) = -q.col(j);
    }
    const Vector vec_sigma = kron.partialPivLu().solve(rhs);

    Matrix sigma(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        sigma.col(j) = vec_sigma.segment(j * d, d);
    }
    // The exact solution is symmetric when Q is; symmetrize away solver noise.
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return sigma;
}

Matrix sqrt_psd(const Matrix& m) {
    require_square(m, "sqrt_psd");
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    const Vector& evals = es.eigenvalues();
    const double scale = std::max(std::abs(evals(0)), std::abs(evals(evals.size() - 1)));
    const double clip = -1e-12 * scale;

    Vector roots(evals.size());
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals(i) < clip) {
            throw NotPsdError("sqrt_psd: eigenvalue " + std::to_string(evals(i)) +
                              " below tolerance " + std::to_string(clip));
        }
        roots(i) = std::sqrt(std::max(evals(i), 0.0));
    }
    Matrix s = es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (s + s.transpose()).eval();
}

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

double hs_norm(const Matrix& m) {
    return m.norm();
}

double asymmetry(const Matrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double min_symmetric_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace clt::linalg

#include "fbnn/linalg.hpp"

#include <cmath>
#include <string>

namespace fbnn {
namespace linalg {

bool is_symmetric(const Matrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
    }
}

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
    }
}

CholeskyResult cholesky(const Matrix& a, double jitter) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("cholesky: matrix must be square");
    }
    if (jitter < 0.0) {
        throw std::invalid_argument("cholesky: jitter must be nonnegative");
    }
    require_finite(a, "cholesky");
    if (!is_symmetric(a)) {
        throw std::invalid_argument("cholesky: matrix is not symmetric");
    }

    const Index n = a.rows();
    double eps = jitter;
    while (true) {
        Matrix shifted = a;
        if (eps > 0.0) shifted.diagonal().array() += eps;
        Eigen::LLT<Matrix> llt(shifted);
        if (llt.info() == Eigen::Success) {
            Matrix l = llt.matrixL();
            // Eigen accepts some indefinite inputs; verify the reconstruction.
            const double scale = std::max(shifted.cwiseAbs().maxCoeff(), 1.0);
            const double err = (l * l.transpose() - shifted).cwiseAbs().maxCoeff();
            if (err <= 1e-8 * scale && l.allFinite()) {
                return CholeskyResult{std::move(l), eps};
            }
        }
        if (eps >= kJitterCap) {
            throw std::runtime_error(
                "cholesky: factorization failed for " + std::to_string(n) + "x" +
                std::to_string(n) + " matrix at jitter " + std::to_string(eps));
        }
        eps = (eps == 0.0) ? kJitterFloor : eps * 10.0;
        if (eps > kJitterCap) eps = kJitterCap;
    }
}

Vector solve_triangular(const Matrix& l, const Vector& b, Side side) {
    if (l.rows() != l.cols()) {
        throw std::invalid_argument("solve_triangular: matrix must be square");
    }
    if (l.rows() != b.size()) {
        throw std::invalid_argument("solve_triangular: dimension mismatch");
    }
    if ((l.diagonal().array() == 0.0).any()) {
        throw std::invalid_argument("solve_triangular: zero diagonal element");
    }
    if (side == Side::Lower) {
        return l.triangularView<Eigen::Lower>().solve(b);
    }
    return l.triangularView<Eigen::Upper>().solve(b);
}

double erf_eval(double z) { return std::erf(z); }

}  // namespace linalg
}  // namespace fbnn

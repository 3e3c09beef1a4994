#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace fbnn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

// Relative tolerance for the symmetry precondition of cholesky().
inline constexpr double kSymmetryRelTol = 1e-10;
// Jitter escalation: start no lower than the floor, multiply by ten, give up
// past the cap.
inline constexpr double kJitterFloor = 1e-10;
inline constexpr double kJitterCap = 1e-4;

struct CholeskyResult {
    Matrix factor;        // lower triangular L with L L^T = a + jitter I
    double jitter = 0.0;  // diagonal jitter actually applied
};

bool is_symmetric(const Matrix& a, double rel_tol = kSymmetryRelTol);

void require_finite(const Matrix& a, const char* what);
void require_finite(const Vector& v, const char* what);

/// Cholesky factor of a symmetric matrix, escalating the diagonal jitter
/// tenfold (up to 1e-4) until the factorization succeeds.
CholeskyResult cholesky(const Matrix& a, double jitter = 0.0);

enum class Side { Lower, Upper };

/// Solves L x = b for triangular L. Throws on a zero diagonal element.
Vector solve_triangular(const Matrix& l, const Vector& b, Side side);

double erf_eval(double z);

}  // namespace linalg
}  // namespace fbnn

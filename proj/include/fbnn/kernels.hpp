#pragma once

#include <string>

#include "fbnn/linalg.hpp"

namespace fbnn {

enum class KernelFamily { Rbf, Arcsin, Arccos };

/// Covariance function description. Rbf uses the lengthscale; Arcsin and
/// Arccos use the prior variances sigma_w2 / sigma_b2 of the network they are
/// the wide limit of.
struct KernelSpec {
    KernelFamily family = KernelFamily::Rbf;
    double lengthscale = 1.0;
    double sigma_w2 = 1.0;
    double sigma_b2 = 1.0;

    static KernelSpec rbf(double lengthscale);
    static KernelSpec arcsin(double sigma_w2, double sigma_b2);
    static KernelSpec arccos(double sigma_w2, double sigma_b2);

    void validate() const;
};

std::string kernel_name(KernelFamily family);
KernelFamily kernel_family_from_name(const std::string& name);

double rbf_eval(double lengthscale, const Vector& x, const Vector& x2);

// Wide-limit kernels for erf and ReLU hidden units. Both use the augmented
// input [x, 1] weighted by Diag(sigma_w2 I, sigma_b2). The arcsin denominator
// is symmetrized, sqrt(1 + 2|x|^2) sqrt(1 + 2|x2|^2); see README.
double arcsin_eval(double sigma_w2, double sigma_b2, const Vector& x, const Vector& x2);
double arccos_eval(double sigma_w2, double sigma_b2, const Vector& x, const Vector& x2);

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& x2);

/// Cross Gram matrix, entry (i, j) = k(x_i, x2_j).
Matrix gram(const KernelSpec& spec, const Matrix& x, const Matrix& x2);

/// Symmetric Gram matrix; the upper triangle is computed once and mirrored.
Matrix gram(const KernelSpec& spec, const Matrix& x);

}  // namespace fbnn

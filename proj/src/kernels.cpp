#include "fbnn/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fbnn {

namespace {

constexpr double kClampTol = 1e-12;

// Clamp an asin/acos argument to [-1, 1]; rounding may push it slightly out.
double clamp_unit(double v, const char* what) {
    if (v > 1.0) {
        if (v > 1.0 + kClampTol) {
            throw std::domain_error(std::string(what) + ": argument " +
                                    std::to_string(v) + " outside [-1, 1]");
        }
        return 1.0;
    }
    if (v < -1.0) {
        if (v < -1.0 - kClampTol) {
            throw std::domain_error(std::string(what) + ": argument " +
                                    std::to_string(v) + " outside [-1, 1]");
        }
        return -1.0;
    }
    return v;
}

void check_dims(const Vector& x, const Vector& x2, const char* what) {
    if (x.size() != x2.size()) {
        throw std::invalid_argument(std::string(what) + ": input dimensions disagree");
    }
}

// Inner product of augmented inputs [x, 1] under Diag(sigma_w2 I, sigma_b2).
double aug_dot(double sigma_w2, double sigma_b2, const Vector& x, const Vector& x2) {
    return sigma_w2 * x.dot(x2) + sigma_b2;
}

}  // namespace

KernelSpec KernelSpec::rbf(double lengthscale) {
    KernelSpec spec;
    spec.family = KernelFamily::Rbf;
    spec.lengthscale = lengthscale;
    spec.validate();
    return spec;
}

KernelSpec KernelSpec::arcsin(double sigma_w2, double sigma_b2) {
    KernelSpec spec;
    spec.family = KernelFamily::Arcsin;
    spec.sigma_w2 = sigma_w2;
    spec.sigma_b2 = sigma_b2;
    spec.validate();
    return spec;
}

KernelSpec KernelSpec::arccos(double sigma_w2, double sigma_b2) {
    KernelSpec spec;
    spec.family = KernelFamily::Arccos;
    spec.sigma_w2 = sigma_w2;
    spec.sigma_b2 = sigma_b2;
    spec.validate();
    return spec;
}

void KernelSpec::validate() const {
    if (family == KernelFamily::Rbf) {
        if (!(lengthscale > 0.0)) {
            throw std::invalid_argument("KernelSpec: lengthscale must be positive");
        }
    } else {
        if (!(sigma_w2 > 0.0) || !(sigma_b2 > 0.0)) {
            throw std::invalid_argument("KernelSpec: prior variances must be positive");
        }
    }
}

std::string kernel_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::Rbf: return "rbf";
        case KernelFamily::Arcsin: return "arcsin";
        case KernelFamily::Arccos: return "arccos";
    }
    throw std::logic_error("kernel_name: unknown family");
}

KernelFamily kernel_family_from_name(const std::string& name) {
    if (name == "rbf") return KernelFamily::Rbf;
    if (name == "arcsin") return KernelFamily::Arcsin;
    if (name == "arccos") return KernelFamily::Arccos;
    throw std::invalid_argument("unknown kernel name: " + name);
}

double rbf_eval(double lengthscale, const Vector& x, const Vector& x2) {
    check_dims(x, x2, "rbf_eval");
    const double d2 = (x - x2).squaredNorm();
    return std::exp(-d2 / (2.0 * lengthscale * lengthscale));
}

double arcsin_eval(double sigma_w2, double sigma_b2, const Vector& x, const Vector& x2) {
    check_dims(x, x2, "arcsin_eval");
    const double cross = aug_dot(sigma_w2, sigma_b2, x, x2);
    const double nx = aug_dot(sigma_w2, sigma_b2, x, x);
    const double nx2 = aug_dot(sigma_w2, sigma_b2, x2, x2);
    const double arg =
        clamp_unit(2.0 * cross / (std::sqrt(1.0 + 2.0 * nx) * std::sqrt(1.0 + 2.0 * nx2)),
                   "arcsin_eval");
    return (2.0 * sigma_w2 / std::numbers::pi) * std::asin(arg) + sigma_b2;
}

double arccos_eval(double sigma_w2, double sigma_b2, const Vector& x, const Vector& x2) {
    check_dims(x, x2, "arccos_eval");
    const double cross = aug_dot(sigma_w2, sigma_b2, x, x2);
    const double nx = std::sqrt(aug_dot(sigma_w2, sigma_b2, x, x));
    const double nx2 = std::sqrt(aug_dot(sigma_w2, sigma_b2, x2, x2));
    const double theta = std::acos(clamp_unit(cross / (nx * nx2), "arccos_eval"));
    const double angular = std::sin(theta) + (std::numbers::pi - theta) * std::cos(theta);
    return sigma_w2 / (2.0 * std::numbers::pi) * nx * nx2 * angular + sigma_b2;
}

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& x2) {
    switch (spec.family) {
        case KernelFamily::Rbf: return rbf_eval(spec.lengthscale, x, x2);
        case KernelFamily::Arcsin: return arcsin_eval(spec.sigma_w2, spec.sigma_b2, x, x2);
        case KernelFamily::Arccos: return arccos_eval(spec.sigma_w2, spec.sigma_b2, x, x2);
    }
    throw std::logic_error("kernel_eval: unknown family");
}

Matrix gram(const KernelSpec& spec, const Matrix& x, const Matrix& x2) {
    if (x.cols() != x2.cols()) {
        throw std::invalid_argument("gram: column counts differ");
    }
    Matrix out(x.rows(), x2.rows());
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < x2.rows(); ++j) {
            out(i, j) = kernel_eval(spec, x.row(i), x2.row(j));
        }
    }
    return out;
}

Matrix gram(const KernelSpec& spec, const Matrix& x) {
    Matrix out(x.rows(), x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = i; j < x.rows(); ++j) {
            const double v = kernel_eval(spec, x.row(i), x.row(j));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

}  // namespace fbnn

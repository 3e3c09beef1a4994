#include "fbnn/gp.hpp"

#include <cmath>
#include <numbers>

namespace fbnn {

namespace {

Matrix noisy_gram(const GpModel& model, const Matrix& x) {
    Matrix k = gram(model.kernel, x);
    if (model.noise_var > 0.0) k.diagonal().array() += model.noise_var;
    return k;
}

}  // namespace

GpPosterior::GpPosterior(GpModel model, Matrix x, const Vector& y)
    : model_(std::move(model)), x_(std::move(x)) {
    model_.validate();
    if (x_.rows() != y.size()) {
        throw std::invalid_argument("gp_fit: X rows and y length disagree");
    }
    if (x_.rows() == 0) return;  // empty conditioning set: prior predictive
    chol_ = linalg::cholesky(noisy_gram(model_, x_));
    const Vector tmp = linalg::solve_triangular(chol_.factor, y, linalg::Side::Lower);
    alpha_ = linalg::solve_triangular(chol_.factor.transpose(), tmp, linalg::Side::Upper);
}

GpPredictive GpPosterior::predict(const Matrix& xstar) const {
    if (x_.rows() > 0 && xstar.cols() != x_.cols()) {
        throw std::invalid_argument("gp_predict: input dimension mismatch");
    }
    GpPredictive out;
    out.cov = gram(model_.kernel, xstar);
    if (x_.rows() == 0) {
        out.mean = Vector::Zero(xstar.rows());
        return out;
    }
    const Matrix kxs = gram(model_.kernel, xstar, x_);  // m x n
    out.mean = kxs * alpha_;
    // cov = K** - K*x (K + noise I)^-1 Kx* via V = L^-1 Kx*
    const Matrix v =
        chol_.factor.triangularView<Eigen::Lower>().solve(kxs.transpose());
    out.cov.noalias() -= v.transpose() * v;
    out.cov = 0.5 * (out.cov + out.cov.transpose().eval());
    return out;
}

Vector gp_prior_sample(const GpModel& model, const Matrix& x, bool include_noise,
                       RandomStream& stream) {
    model.validate();
    Matrix k = include_noise ? noisy_gram(model, x) : gram(model.kernel, x);
    return mvn_sample(Vector::Zero(x.rows()), k, stream);
}

Vector gp_prior_sample(const GpModel& model, const Matrix& x, bool include_noise,
                       const SeedPath& seed) {
    RandomStream stream(seed);
    return gp_prior_sample(model, x, include_noise, stream);
}

GpPosterior gp_fit(const GpModel& model, const Matrix& x, const Vector& y) {
    return GpPosterior(model, x, y);
}

double log_data_likelihood(const GpModel& model, const Matrix& x, const Vector& y) {
    model.validate();
    if (x.rows() != y.size()) {
        throw std::invalid_argument("log_data_likelihood: X rows and y length disagree");
    }
    const Index n = y.size();
    const auto chol = linalg::cholesky(noisy_gram(model, x));
    const Vector w = linalg::solve_triangular(chol.factor, y, linalg::Side::Lower);
    const double log_det = 2.0 * chol.factor.diagonal().array().log().sum();
    return -0.5 * w.squaredNorm() - 0.5 * log_det -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

}  // namespace fbnn

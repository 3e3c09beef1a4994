#pragma once

#include "fbnn/kernels.hpp"
#include "fbnn/rng.hpp"

namespace fbnn {

/// Zero-mean GP with additive observation noise sigma_eps^2.
struct GpModel {
    KernelSpec kernel;
    double noise_var = 0.0;

    void validate() const {
        kernel.validate();
        if (noise_var < 0.0) {
            throw std::invalid_argument("GpModel: noise_var must be nonnegative");
        }
    }
};

struct GpPredictive {
    Vector mean;
    Matrix cov;
};

/// Cached training factorization: L L^T = K(X, X) + noise_var I and
/// alpha = (K + noise_var I)^{-1} y. Immutable once built; predict() is safe
/// to call concurrently.
class GpPosterior {
public:
    GpPosterior(GpModel model, Matrix x, const Vector& y);

    GpPredictive predict(const Matrix& xstar) const;

    const GpModel& model() const { return model_; }
    const Matrix& train_inputs() const { return x_; }
    const Vector& alpha() const { return alpha_; }
    const Matrix& factor() const { return chol_.factor; }
    double jitter() const { return chol_.jitter; }

private:
    GpModel model_;
    Matrix x_;
    linalg::CholeskyResult chol_;
    Vector alpha_;
};

Vector gp_prior_sample(const GpModel& model, const Matrix& x, bool include_noise,
                       RandomStream& stream);
Vector gp_prior_sample(const GpModel& model, const Matrix& x, bool include_noise,
                       const SeedPath& seed);

GpPosterior gp_fit(const GpModel& model, const Matrix& x, const Vector& y);

/// Log density of y under N(0, K(x, x) + noise_var I), computed via Cholesky.
double log_data_likelihood(const GpModel& model, const Matrix& x, const Vector& y);

}  // namespace fbnn

#pragma once

#include <string>

#include "fbnn/nuts.hpp"
#include "fbnn/rng.hpp"

namespace fbnn {

struct KernelSpec;
struct LowpassContext;

enum class Activation { Erf, Relu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// One-hidden-layer network f(x) = (1/sqrt(H)) w1 phi(w0 x + b0) + b1 with
/// independent Gaussian priors: weights N(0, sigma_w2), biases N(0, sigma_b2).
struct BnnSpec {
    int width = 1;  // H
    Activation activation = Activation::Erf;
    int input_dim = 1;
    double sigma_w2 = 1.0;
    double sigma_b2 = 1.0;
    double noise_var = 0.01;

    int param_count() const { return width * (input_dim + 2) + 1; }
    void validate() const;

    /// The kernel this network converges to as width grows: erf -> Arcsin,
    /// relu -> Arccos, with the same prior variances.
    KernelSpec limiting_kernel() const;
};

// Flattened parameter layout: [w0 row-major (H x d_in), b0 (H), w1 (H), b1].
struct ParamLayout {
    int width = 0;
    int input_dim = 0;
    explicit ParamLayout(const BnnSpec& spec)
        : width(spec.width), input_dim(spec.input_dim) {}
    int w0_offset() const { return 0; }
    int b0_offset() const { return width * input_dim; }
    int w1_offset() const { return width * (input_dim + 1); }
    int b1_offset() const { return width * (input_dim + 2); }
    int total() const { return width * (input_dim + 2) + 1; }
};

Vector forward(const BnnSpec& spec, const Vector& theta, const Matrix& x);

double log_prior(const BnnSpec& spec, const Vector& theta);

double log_likelihood(const BnnSpec& spec, const Vector& theta, const Matrix& x,
                      const Vector& y);

/// Gradient of sum_i cotangent_i * f(x_i) with respect to theta.
Vector forward_vjp(const BnnSpec& spec, const Vector& theta, const Matrix& x,
                   const Vector& cotangent);

struct LogJoint {
    double value = 0.0;
    Vector grad;
};

/// Log prior + log likelihood and its analytic gradient. When filter is given
/// the likelihood is evaluated through the low-pass filtered forward map; the
/// data inputs must already be snapped to the filter grid.
LogJoint log_joint_and_grad(const BnnSpec& spec, const Vector& theta, const Matrix& x,
                            const Vector& y, const LowpassContext* filter = nullptr);

/// Draw from the parameter prior (optionally scaled down, e.g. for chain
/// initialization).
Vector sample_prior_params(const BnnSpec& spec, RandomStream& stream, double scale = 1.0);

/// Chain initializer drawing from the scaled-down parameter prior.
InitFn bnn_prior_init(const BnnSpec& spec, double scale = 0.1);

/// Row m is forward(theta_m, xstar); no observation noise is added.
Matrix predictive_function_draws(const BnnSpec& spec, const Matrix& draws,
                                 const Matrix& xstar);

}  // namespace fbnn

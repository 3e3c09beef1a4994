#include "fbnn/bnn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fbnn/kernels.hpp"
#include "fbnn/lowpass.hpp"

namespace fbnn {

namespace {

const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

double activate(Activation a, double z) {
    return a == Activation::Erf ? std::erf(z) : std::max(z, 0.0);
}

// relu' at exactly 0 is taken as 0
double activate_deriv(Activation a, double z) {
    if (a == Activation::Erf) return 2.0 * kInvSqrtPi * std::exp(-z * z);
    return z > 0.0 ? 1.0 : 0.0;
}

void check_theta(const BnnSpec& spec, const Vector& theta) {
    if (theta.size() != spec.param_count()) {
        throw std::invalid_argument("theta length does not match the architecture");
    }
}

void check_inputs(const BnnSpec& spec, const Matrix& x) {
    if (x.cols() != spec.input_dim) {
        throw std::invalid_argument("input dimension does not match the architecture");
    }
}

double gauss_log_pdf_sum(const auto& values, double variance) {
    const double n = static_cast<double>(values.size());
    return -0.5 * n * std::log(2.0 * std::numbers::pi * variance) -
           values.squaredNorm() / (2.0 * variance);
}

}  // namespace

std::string activation_name(Activation a) {
    return a == Activation::Erf ? "erf" : "relu";
}

Activation activation_from_name(const std::string& name) {
    if (name == "erf") return Activation::Erf;
    if (name == "relu") return Activation::Relu;
    throw std::invalid_argument("unknown activation: " + name);
}

void BnnSpec::validate() const {
    if (width < 1) throw std::invalid_argument("BnnSpec: width must be >= 1");
    if (input_dim < 1) throw std::invalid_argument("BnnSpec: input_dim must be >= 1");
    if (!(sigma_w2 > 0.0) || !(sigma_b2 > 0.0)) {
        throw std::invalid_argument("BnnSpec: prior variances must be positive");
    }
    if (!(noise_var > 0.0)) {
        throw std::invalid_argument("BnnSpec: noise_var must be positive");
    }
}

KernelSpec BnnSpec::limiting_kernel() const {
    return activation == Activation::Erf ? KernelSpec::arcsin(sigma_w2, sigma_b2)
                                         : KernelSpec::arccos(sigma_w2, sigma_b2);
}

Vector forward(const BnnSpec& spec, const Vector& theta, const Matrix& x) {
    check_theta(spec, theta);
    check_inputs(spec, x);
    const ParamLayout lay(spec);
    const auto w0 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(
        theta.data() + lay.w0_offset(), spec.width, spec.input_dim);
    const auto b0 = theta.segment(lay.b0_offset(), spec.width);
    const auto w1 = theta.segment(lay.w1_offset(), spec.width);
    const double b1 = theta[lay.b1_offset()];

    Matrix z = x * w0.transpose();  // n x H
    z.rowwise() += b0.transpose();
    if (spec.activation == Activation::Erf) {
        z = z.unaryExpr([](double v) { return std::erf(v); });
    } else {
        z = z.cwiseMax(0.0);
    }
    return (z * w1) / std::sqrt(static_cast<double>(spec.width)) +
           Vector::Constant(x.rows(), b1);
}

double log_prior(const BnnSpec& spec, const Vector& theta) {
    check_theta(spec, theta);
    const ParamLayout lay(spec);
    const auto w0 = theta.segment(lay.w0_offset(), spec.width * spec.input_dim);
    const auto b0 = theta.segment(lay.b0_offset(), spec.width);
    const auto w1 = theta.segment(lay.w1_offset(), spec.width);
    const auto b1 = theta.segment(lay.b1_offset(), 1);
    return gauss_log_pdf_sum(w0, spec.sigma_w2) + gauss_log_pdf_sum(w1, spec.sigma_w2) +
           gauss_log_pdf_sum(b0, spec.sigma_b2) + gauss_log_pdf_sum(b1, spec.sigma_b2);
}

double log_likelihood(const BnnSpec& spec, const Vector& theta, const Matrix& x,
                      const Vector& y) {
    if (x.rows() != y.size()) {
        throw std::invalid_argument("log_likelihood: X rows and y length disagree");
    }
    const Vector residual = y - forward(spec, theta, x);
    return gauss_log_pdf_sum(residual, spec.noise_var);
}

Vector forward_vjp(const BnnSpec& spec, const Vector& theta, const Matrix& x,
                   const Vector& cotangent) {
    check_theta(spec, theta);
    check_inputs(spec, x);
    if (x.rows() != cotangent.size()) {
        throw std::invalid_argument("forward_vjp: cotangent length mismatch");
    }
    const ParamLayout lay(spec);
    const auto w0 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(
        theta.data() + lay.w0_offset(), spec.width, spec.input_dim);
    const auto b0 = theta.segment(lay.b0_offset(), spec.width);
    const auto w1 = theta.segment(lay.w1_offset(), spec.width);
    const double inv_sqrt_h = 1.0 / std::sqrt(static_cast<double>(spec.width));

    Matrix pre = x * w0.transpose();  // n x H
    pre.rowwise() += b0.transpose();
    Matrix act(pre.rows(), pre.cols());
    Matrix dact(pre.rows(), pre.cols());
    for (Index i = 0; i < pre.rows(); ++i) {
        for (Index h = 0; h < pre.cols(); ++h) {
            act(i, h) = activate(spec.activation, pre(i, h));
            dact(i, h) = activate_deriv(spec.activation, pre(i, h));
        }
    }

    Vector grad = Vector::Zero(lay.total());
    // d/db1 = sum_i c_i
    grad[lay.b1_offset()] = cotangent.sum();
    // d/dw1_h = (1/sqrt H) sum_i c_i act(i, h)
    grad.segment(lay.w1_offset(), spec.width) = inv_sqrt_h * (act.transpose() * cotangent);
    // dz(i, h) = c_i (1/sqrt H) w1_h dact(i, h)
    Matrix dz = (dact.array().colwise() * cotangent.array()).matrix();
    dz *= inv_sqrt_h;
    dz.array().rowwise() *= w1.transpose().array();
    grad.segment(lay.b0_offset(), spec.width) = dz.colwise().sum().transpose();
    // d/dw0_{h,d} = sum_i dz(i, h) x(i, d), stored row-major
    const Matrix dw0 = dz.transpose() * x;  // H x d_in
    auto dw0_out = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(
        grad.data() + lay.w0_offset(), spec.width, spec.input_dim);
    dw0_out = dw0;
    return grad;
}

LogJoint log_joint_and_grad(const BnnSpec& spec, const Vector& theta, const Matrix& x,
                            const Vector& y, const LowpassContext* filter) {
    check_theta(spec, theta);
    if (x.rows() != y.size()) {
        throw std::invalid_argument("log_joint_and_grad: X rows and y length disagree");
    }
    const ParamLayout lay(spec);

    LogJoint out;
    Vector likelihood_cotangent;  // d loglik / d f at the evaluation inputs
    if (filter == nullptr) {
        const Vector residual = y - forward(spec, theta, x);
        out.value = gauss_log_pdf_sum(residual, spec.noise_var);
        likelihood_cotangent = residual / spec.noise_var;
        out.grad = forward_vjp(spec, theta, x, likelihood_cotangent);
    } else {
        const LpfForward filtered = lpf_forward(spec, theta, *filter);
        const Vector residual = y - filtered.at_data;
        out.value = gauss_log_pdf_sum(residual, spec.noise_var);
        // Scatter the residual cotangent onto the grid, pull it back through
        // the (symmetric) filter, then through the network at the grid inputs.
        Vector scatter = Vector::Zero(filter->grid.n_grid);
        for (Index i = 0; i < residual.size(); ++i) {
            scatter[filter->selection[static_cast<std::size_t>(i)]] +=
                residual[i] / spec.noise_var;
        }
        const Vector grid_cotangent = lowpass_apply(filter->plan, filter->t, scatter);
        out.grad = forward_vjp(spec, theta, filter->grid_inputs, grid_cotangent);
    }

    out.value += log_prior(spec, theta);
    out.grad.segment(lay.w0_offset(), spec.width * spec.input_dim) -=
        theta.segment(lay.w0_offset(), spec.width * spec.input_dim) / spec.sigma_w2;
    out.grad.segment(lay.w1_offset(), spec.width) -=
        theta.segment(lay.w1_offset(), spec.width) / spec.sigma_w2;
    out.grad.segment(lay.b0_offset(), spec.width) -=
        theta.segment(lay.b0_offset(), spec.width) / spec.sigma_b2;
    out.grad[lay.b1_offset()] -= theta[lay.b1_offset()] / spec.sigma_b2;
    return out;
}

Vector sample_prior_params(const BnnSpec& spec, RandomStream& stream, double scale) {
    spec.validate();
    const ParamLayout lay(spec);
    Vector theta(lay.total());
    const double sw = std::sqrt(spec.sigma_w2) * scale;
    const double sb = std::sqrt(spec.sigma_b2) * scale;
    for (int i = 0; i < lay.b0_offset(); ++i) theta[i] = sw * stream.normal();
    for (int i = lay.b0_offset(); i < lay.w1_offset(); ++i) theta[i] = sb * stream.normal();
    for (int i = lay.w1_offset(); i < lay.b1_offset(); ++i) theta[i] = sw * stream.normal();
    theta[lay.b1_offset()] = sb * stream.normal();
    return theta;
}

InitFn bnn_prior_init(const BnnSpec& spec, double scale) {
    return [spec, scale](RandomStream& stream) {
        return sample_prior_params(spec, stream, scale);
    };
}

Matrix predictive_function_draws(const BnnSpec& spec, const Matrix& draws,
                                 const Matrix& xstar) {
    if (draws.rows() == 0) {
        throw std::invalid_argument("predictive_function_draws: no parameter draws");
    }
    Matrix out(draws.rows(), xstar.rows());
    for (Index m = 0; m < draws.rows(); ++m) {
        out.row(m) = forward(spec, draws.row(m), xstar).transpose();
    }
    return out;
}

}  // namespace fbnn

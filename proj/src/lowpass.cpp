#include "fbnn/lowpass.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fbnn {

void GridSpec::validate() const {
    if (n_grid < 2) throw std::invalid_argument("GridSpec: need at least two points");
    if (!(hi > lo)) throw std::invalid_argument("GridSpec: hi must exceed lo");
}

Vector GridSpec::points() const {
    validate();
    return Vector::LinSpaced(n_grid, lo, hi);
}

Matrix GridSpec::points_matrix() const {
    Matrix out(n_grid, 1);
    out.col(0) = points();
    return out;
}

GridSpec make_grid(double lo, double hi, int n_grid) {
    GridSpec grid{lo, hi, n_grid};
    grid.validate();
    return grid;
}

std::vector<Index> snap_to_grid(const GridSpec& grid, const Matrix& x) {
    grid.validate();
    if (x.cols() != 1) {
        throw std::invalid_argument("snap_to_grid: only one-dimensional inputs");
    }
    const double step = grid.spacing();
    std::vector<Index> idx(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) {
        const double u = (x(i, 0) - grid.lo) / step;
        // round half down so a midpoint resolves to the lower index
        auto j = static_cast<Index>(std::ceil(u - 0.5));
        j = std::max<Index>(0, std::min<Index>(grid.n_grid - 1, j));
        idx[static_cast<std::size_t>(i)] = j;
    }
    return idx;
}

LowpassContext make_lowpass_context(const GridSpec& grid, double t, const Matrix& x) {
    grid.validate();
    if (t < 0.0 || t > 1.0) {
        throw std::invalid_argument("make_lowpass_context: t must lie in [0, 1]");
    }
    LowpassContext ctx;
    ctx.grid = grid;
    ctx.plan = dct_plan(grid.n_grid);
    ctx.t = t;
    ctx.selection = snap_to_grid(grid, x);
    ctx.grid_inputs = grid.points_matrix();
    return ctx;
}

LpfForward lpf_forward(const BnnSpec& spec, const Vector& theta,
                       const LowpassContext& ctx) {
    LpfForward out;
    const Vector raw = forward(spec, theta, ctx.grid_inputs);
    out.grid_values = lowpass_apply(ctx.plan, ctx.t, raw);
    out.at_data.resize(static_cast<Index>(ctx.selection.size()));
    for (std::size_t i = 0; i < ctx.selection.size(); ++i) {
        out.at_data[static_cast<Index>(i)] = out.grid_values[ctx.selection[i]];
    }
    return out;
}

double lpf_log_likelihood(const BnnSpec& spec, const Vector& theta,
                          const LowpassContext& ctx, const Vector& y) {
    if (static_cast<std::size_t>(y.size()) != ctx.selection.size()) {
        throw std::invalid_argument("lpf_log_likelihood: y length mismatch");
    }
    const Vector residual = y - lpf_forward(spec, theta, ctx).at_data;
    const double n = static_cast<double>(residual.size());
    return -0.5 * n * std::log(2.0 * std::numbers::pi * spec.noise_var) -
           residual.squaredNorm() / (2.0 * spec.noise_var);
}

}  // namespace fbnn

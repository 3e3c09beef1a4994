#pragma once

#include <vector>

#include "fbnn/bnn.hpp"
#include "fbnn/dct.hpp"
#include "fbnn/linalg.hpp"

namespace fbnn {

// Uniform one-dimensional evaluation grid with n_grid points spanning [lo, hi]
// inclusive of both endpoints.
struct GridSpec {
    double lo = -3.5;
    double hi = 3.5;
    int n_grid = 256;

    double spacing() const { return (hi - lo) / static_cast<double>(n_grid - 1); }
    Vector points() const;
    Matrix points_matrix() const;  // n_grid x 1, ready for forward()
    void validate() const;
};

GridSpec make_grid(double lo, double hi, int n_grid);

// Nearest grid index for each input; exact midpoints resolve to the lower index.
// Only one-dimensional inputs are supported.
std::vector<Index> snap_to_grid(const GridSpec& grid, const Matrix& x);

// Everything needed to evaluate a filtered network against a fixed data design:
// the grid, the transform plan over it, the cutoff, and the grid index each
// data point snaps to.
struct LowpassContext {
    GridSpec grid;
    DctPlan plan;
    double t = 0.0;
    std::vector<Index> selection;
    Matrix grid_inputs;
};

LowpassContext make_lowpass_context(const GridSpec& grid, double t, const Matrix& x);

struct LpfForward {
    Vector grid_values;  // filtered function over the full grid
    Vector at_data;      // filtered function gathered at the snapped data indices
};

LpfForward lpf_forward(const BnnSpec& spec, const Vector& theta,
                       const LowpassContext& ctx);

double lpf_log_likelihood(const BnnSpec& spec, const Vector& theta,
                          const LowpassContext& ctx, const Vector& y);

}  // namespace fbnn

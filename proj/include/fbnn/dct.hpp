#pragma once

#include <vector>

#include "fbnn/linalg.hpp"

namespace fbnn {

/// Orthonormal type-II DCT on a grid of n points, held as the explicit n x n
/// matrix T with T_ij = sqrt(2) / sqrt(2^[i=0] n) * cos(pi i (2j+1) / (2n)).
/// T T^T = I, so the inverse transform is T^T.
struct DctPlan {
    int n = 0;
    Matrix transform;
};

DctPlan dct_plan(int n);

Vector dct_forward(const DctPlan& plan, const Vector& f);
Vector dct_inverse(const DctPlan& plan, const Vector& a);

/// Number of retained coefficients for threshold t: #{k : k < (1 - t) n}.
int lowpass_kept_count(int n, double t);

/// C = T^T diag(1[k < (1 - t) n]) T. Symmetric and idempotent.
Matrix lowpass_matrix(const DctPlan& plan, double t);

/// C f computed as forward -> mask -> inverse, without forming C. When no
/// coefficient is removed the input is returned unchanged.
Vector lowpass_apply(const DctPlan& plan, double t, const Vector& f);

/// Per-frequency percentile table of DCT coefficients across function draws.
/// values(i, j) is the percentiles[j]-th percentile of coefficient i.
struct SpectrumSummary {
    std::vector<double> percentiles;
    Matrix values;  // n_coefficients x percentiles.size()
};

/// Rows of function_samples are functions on the plan's grid. Percentiles are
/// taken over |a_i| by default (signed coefficients behind the flag) with
/// linear interpolation between order statistics.
SpectrumSummary spectrum_percentiles(const Matrix& function_samples, const DctPlan& plan,
                                     const std::vector<double>& percentiles,
                                     bool use_magnitude = true);

/// Linear interpolation between order statistics; pct in [0, 100].
double percentile_of_sorted(const std::vector<double>& sorted, double pct);

}  // namespace fbnn

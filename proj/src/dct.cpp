#include "fbnn/dct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fbnn {

DctPlan dct_plan(int n) {
    if (n < 1) throw std::invalid_argument("dct_plan: grid size must be >= 1");
    DctPlan plan;
    plan.n = n;
    plan.transform.resize(n, n);
    const double nd = static_cast<double>(n);
    for (int i = 0; i < n; ++i) {
        const double scale = std::sqrt(2.0) / std::sqrt((i == 0 ? 2.0 : 1.0) * nd);
        for (int j = 0; j < n; ++j) {
            plan.transform(i, j) =
                scale * std::cos(std::numbers::pi * i * (2.0 * j + 1.0) / (2.0 * nd));
        }
    }
    return plan;
}

namespace {

void check_length(const DctPlan& plan, const Vector& v, const char* what) {
    if (v.size() != plan.n) {
        throw std::invalid_argument(std::string(what) + ": vector length does not match plan");
    }
}

void check_threshold(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::invalid_argument("lowpass threshold must lie in [0, 1]");
    }
}

}  // namespace

Vector dct_forward(const DctPlan& plan, const Vector& f) {
    check_length(plan, f, "dct_forward");
    return plan.transform * f;
}

Vector dct_inverse(const DctPlan& plan, const Vector& a) {
    check_length(plan, a, "dct_inverse");
    return plan.transform.transpose() * a;
}

int lowpass_kept_count(int n, double t) {
    check_threshold(t);
    // Coefficient k survives iff k < (1 - t) n; no epsilon on the comparison.
    const double cutoff = (1.0 - t) * static_cast<double>(n);
    int kept = 0;
    while (kept < n && static_cast<double>(kept) < cutoff) ++kept;
    return kept;
}

Matrix lowpass_matrix(const DctPlan& plan, double t) {
    const int kept = lowpass_kept_count(plan.n, t);
    const auto top = plan.transform.topRows(kept);
    return top.transpose() * top;
}

Vector lowpass_apply(const DctPlan& plan, double t, const Vector& f) {
    check_length(plan, f, "lowpass_apply");
    const int kept = lowpass_kept_count(plan.n, t);
    if (kept == plan.n) return f;
    if (kept == 0) return Vector::Zero(plan.n);
    const auto top = plan.transform.topRows(kept);
    return top.transpose() * (top * f);
}

double percentile_of_sorted(const std::vector<double>& sorted, double pct) {
    if (sorted.empty()) throw std::invalid_argument("percentile of empty sample");
    if (!(pct >= 0.0 && pct <= 100.0)) {
        throw std::invalid_argument("percentile must lie in [0, 100]");
    }
    const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lower = static_cast<std::size_t>(std::floor(pos));
    if (lower + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lower);
    return sorted[lower] + frac * (sorted[lower + 1] - sorted[lower]);
}

SpectrumSummary spectrum_percentiles(const Matrix& function_samples, const DctPlan& plan,
                                     const std::vector<double>& percentiles,
                                     bool use_magnitude) {
    if (function_samples.rows() < 2) {
        throw std::invalid_argument("spectrum_percentiles: need at least two function samples");
    }
    if (function_samples.cols() != plan.n) {
        throw std::invalid_argument("spectrum_percentiles: sample length does not match plan");
    }
    const Index m = function_samples.rows();
    // coefficients(s, i) = a_i of sample s
    const Matrix coefficients = function_samples * plan.transform.transpose();

    SpectrumSummary out;
    out.percentiles = percentiles;
    out.values.resize(plan.n, static_cast<Index>(percentiles.size()));
    std::vector<double> column(static_cast<std::size_t>(m));
    for (int i = 0; i < plan.n; ++i) {
        for (Index s = 0; s < m; ++s) {
            const double a = coefficients(s, i);
            column[static_cast<std::size_t>(s)] = use_magnitude ? std::abs(a) : a;
        }
        std::sort(column.begin(), column.end());
        for (std::size_t j = 0; j < percentiles.size(); ++j) {
            out.values(i, static_cast<Index>(j)) = percentile_of_sorted(column, percentiles[j]);
        }
    }
    return out;
}

}  // namespace fbnn

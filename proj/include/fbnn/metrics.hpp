#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fbnn/bnn.hpp"
#include "fbnn/dataset.hpp"
#include "fbnn/gp.hpp"
#include "fbnn/lowpass.hpp"

namespace fbnn {

// Raised when BNN and NNGP metric rows cannot be matched dataset-for-dataset.
struct PairingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MetricRow {
    std::string dataset_id;
    std::string model;  // "bnn" or "nngp"
    int width = 0;      // 0 for nngp
    double t = 0.0;
    double nll = 0.0;  // mean per-test-point negative log predictive density
    double mse = 0.0;  // squared error of the predictive mean vs f_test
};

struct DeltaSummary {
    int width = 0;
    double t = 0.0;
    double delta_nll = 0.0;
    double delta_nll_se = 0.0;
    double delta_mse = 0.0;
    double delta_mse_se = 0.0;
    int s_count = 0;
};

// Posterior-predictive metrics from parameter draws. When filter is supplied
// the predictions go through the low-pass filtered forward map and are read at
// the test inputs' snapped grid positions (filter must be built on x_test).
// moment_matched swaps the exact log-mean-exp mixture NLL for a Gaussian fit
// to the per-point predictive mean/variance.
MetricRow evaluate_bnn(const BnnSpec& spec, const Matrix& draws, const Dataset& ds,
                       const LowpassContext* filter = nullptr,
                       bool moment_matched = false);

// Exact GP predictive metrics; per-point variance is the posterior function
// variance (clipped at zero) plus the observation noise.
MetricRow evaluate_nngp(const GpModel& model, const Dataset& ds);

std::vector<DeltaSummary> delta_metrics(const std::vector<MetricRow>& bnn_rows,
                                        const std::vector<MetricRow>& nngp_rows);

std::string metrics_to_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> metrics_from_csv(const std::vector<std::string>& lines);
std::string deltas_to_csv(const std::vector<DeltaSummary>& deltas);

}  // namespace fbnn

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbnn/bnn.hpp"
#include "fbnn/gp.hpp"
#include "fbnn/kernels.hpp"
#include "fbnn/lowpass.hpp"
#include "fbnn/nuts.hpp"

namespace fbnn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataConfig {
    KernelSpec kernel;       // synthetic generator; valid only when has_kernel
    bool has_kernel = false;
    double sigma_eps = 0.1;
    double filter_t = 0.0;  // > 0 generates low-pass filtered targets
    std::string source;     // nonempty: real tabular CSV instead of a generator
    std::string target_column;
    bool standardize = true;
};

struct ModelsConfig {
    bool nngp = true;
    std::vector<int> widths;  // empty = no BNN fits
    Activation activation = Activation::Relu;
    double sigma_w2 = 2.0;
    double sigma_b2 = 2.0;
    double noise_var = 0.01;
    bool nngp_select = false;  // hyper grid search on the validation split
    std::vector<double> hyper_grid = {0.5, 1.0, 1.5, 2.0};
};

struct FilterConfig {
    std::vector<double> ts = {0.0};
    int n_grid = 256;
    double grid_lo = -3.5;
    double grid_hi = 3.5;
};

struct SpectrumConfig {
    bool enabled = false;
    int m_draws = 2000;
    std::vector<double> percentiles = {1.0, 25.0, 50.0, 75.0, 99.0};
    std::string dataset;  // dataset id; empty means the suite's first dataset
};

struct LdlConfig {
    bool enabled = false;
    int s_count = 500;
    std::vector<int> widths = {2};
    KernelSpec evaluator = KernelSpec::rbf(2.0);
};

struct RunConfig {
    uint64_t seed = 0;
    std::string out_dir = "out";
    int s_count = 20;
    int workers = 1;
    DataConfig data;
    ModelsConfig models;
    SamplerConfig sampler;
    FilterConfig filter;
    SpectrumConfig spectrum;
    LdlConfig ldl;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_string(const std::string& text);
    void validate() const;
    void apply_full_scale();

    // Assembled from the models section (input_dim filled in per dataset).
    BnnSpec bnn_spec(int width, int input_dim = 1) const;
    // The limiting kernel of the configured BNN family with matching noise.
    GpModel nngp_model() const;
    GridSpec grid() const;
};

}  // namespace fbnn

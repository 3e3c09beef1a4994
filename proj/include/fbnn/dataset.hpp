#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fbnn/gp.hpp"
#include "fbnn/linalg.hpp"
#include "fbnn/lowpass.hpp"
#include "fbnn/rng.hpp"

namespace fbnn {

// Ordered `key = value` header block carried with every dataset file.
class Manifest {
public:
    void set(const std::string& key, std::string value);
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, long long value);
    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  // throws IoError if absent
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

struct Dataset {
    std::string id;
    Matrix x_train;
    Vector y_train;
    Vector f_train;  // noiseless training targets; empty for real data
    Matrix x_test;
    Vector f_test;  // evaluation targets (noiseless for synthetic, observed for real)
    Matrix x_valid;  // empty unless the source provides a validation split
    Vector y_valid;
    Manifest manifest;

    Index input_dim() const { return x_train.cols(); }
    bool has_valid() const { return x_valid.rows() > 0; }
};

// 20 uniform points from [-3,-1] u [1,3] (interval chosen with probability 1/2,
// then uniform within) plus x = 0, in sampling order.
Matrix sample_train_design(RandomStream& stream);
// 100 uniform points on [-3, 3].
Matrix sample_test_design(RandomStream& stream);

std::vector<Dataset> generate_synthetic_suite(const KernelSpec& kernel, int s_count,
                                              double sigma_eps, const SeedPath& seed);

// The filtered noiseless grid function a given seed produces (the function
// lpf_gp_dataset reads its targets from).
Vector lpf_grid_function(const GpModel& gp, const GridSpec& grid, double t,
                         const SeedPath& seed);

// One dataset whose targets come from a low-pass filtered GP function sampled
// on the grid; train/test inputs are snapped to the grid and stored snapped.
Dataset lpf_gp_dataset(const GpModel& gp, const GridSpec& grid, double t,
                       const Matrix& x_train, const Matrix& x_test, double sigma_eps,
                       const SeedPath& seed);

std::string dataset_to_string(const Dataset& ds);
Dataset dataset_from_string(const std::string& text, std::string id);
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

// Reconstructs the generating kernel from manifest fields (kernel, lengthscale
// or sigma_w2/sigma_b2).
KernelSpec kernel_from_manifest(const Manifest& manifest);
void kernel_to_manifest(const KernelSpec& kernel, Manifest& manifest);

}  // namespace fbnn

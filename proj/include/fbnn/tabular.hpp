#pragma once

#include <string>

#include "fbnn/dataset.hpp"
#include "fbnn/rng.hpp"

namespace fbnn {

struct SplitRatios {
    double train = 0.8;
    double test = 0.1;
    // validation takes whatever remains
    void validate() const;
};

// Reads a numeric CSV with a header row, shuffles deterministically, splits
// train/test/valid, and (optionally) standardizes every column using
// statistics fit on the training split only. For real data the evaluation
// target f_test is the observed (standardized) response.
Dataset load_tabular(const std::string& path, const std::string& target_column,
                     bool standardize, const SeedPath& seed,
                     const SplitRatios& ratios = SplitRatios{});

}  // namespace fbnn

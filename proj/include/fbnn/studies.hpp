#pragma once

#include <string>
#include <vector>

#include "fbnn/bnn.hpp"
#include "fbnn/dataset.hpp"
#include "fbnn/dct.hpp"
#include "fbnn/gp.hpp"
#include "fbnn/lowpass.hpp"

namespace fbnn {

// --- Log-data-likelihood study (dataset diversity of priors) ---------------

struct LdlRow {
    std::string model;  // "bnn" or "nngp"
    int width = 0;      // 0 for nngp
    int sample_id = 0;
    double ldl = 0.0;
};

struct LdlGenerator {
    enum class Kind { BnnPrior, NngpPrior } kind = Kind::BnnPrior;
    BnnSpec bnn;       // used when kind == BnnPrior
    KernelSpec nngp;   // used when kind == NngpPrior

    static LdlGenerator bnn_prior(const BnnSpec& spec);
    static LdlGenerator nngp_prior(const KernelSpec& kernel);
};

// Draws S datasets (function values at a freshly resampled 21-point training
// design plus observation noise) from the generator and scores each with the
// evaluator's log data likelihood.
std::vector<LdlRow> ldl_cdf_study(const LdlGenerator& generator, const GpModel& evaluator,
                                  int s_count, double sigma_eps, const SeedPath& seed);

// Sorted copy of the scores: the empirical CDF steps by 1/S at each value.
std::vector<double> empirical_cdf(const std::vector<LdlRow>& rows);

std::string ldl_to_csv(const std::vector<LdlRow>& rows);

// --- Spectral study (DCT coefficient percentiles of sampled functions) -----

struct FunctionSource {
    enum class Kind { BnnPrior, BnnPosterior, NngpPrior, NngpPosterior, DataGp } kind =
        Kind::NngpPrior;
    BnnSpec bnn;
    Matrix posterior_draws;  // parameter draws for BnnPosterior
    GpModel gp;              // for the three GP-backed kinds
    Matrix x_train;          // conditioning data for NngpPosterior
    Vector y_train;
    double filter_t = 0.0;  // DataGp only: low-pass applied to each draw

    static FunctionSource bnn_prior(const BnnSpec& spec);
    static FunctionSource bnn_posterior(const BnnSpec& spec, Matrix draws);
    static FunctionSource nngp_prior(const GpModel& model);
    static FunctionSource nngp_posterior(const GpModel& model, Matrix x, Vector y);
    static FunctionSource data_gp(const GpModel& model, double t);
};

// M function draws on the grid, one per row. GP sources use exact multivariate
// normals (one factorization, M standard-normal solves); BnnPosterior reuses
// the given parameter draws (evenly subsampled when more than M are present).
Matrix draw_functions(const FunctionSource& source, const GridSpec& grid, int m_draws,
                      const SeedPath& seed);

SpectrumSummary spectrum_study(const FunctionSource& source, const GridSpec& grid,
                               int m_draws, const std::vector<double>& percentiles,
                               const SeedPath& seed);

// Rows `phase,model,width,coeff_index,percentile,value` for one summary.
std::string spectrum_rows(const std::string& phase, const std::string& model, int width,
                          const SpectrumSummary& summary);
std::string spectrum_csv_header();

// --- NNGP hyperparameter selection on the validation split -----------------

// Evaluates each candidate value on validation MSE; for rbf the value is the
// lengthscale, otherwise it is used for both sigma_w2 and sigma_b2. Ties break
// to the smaller value.
KernelSpec nngp_model_select(KernelFamily family, const std::vector<double>& grid,
                             double noise_var, const Dataset& ds);

}  // namespace fbnn

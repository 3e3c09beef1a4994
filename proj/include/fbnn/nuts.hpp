#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fbnn/linalg.hpp"
#include "fbnn/rng.hpp"

namespace fbnn {

struct SamplerConfig {
    int chains = 4;
    int warmup = 1000;
    int kept = 2500;  // post-warmup iterations per chain, before thinning
    int thin = 5;
    double target_accept = 0.8;
    int max_tree_depth = 10;
    double init_step_size = 0.1;
    double divergence_threshold = 1000.0;

    void validate() const;
    int draws_per_chain() const { return kept / thin; }
    static SamplerConfig desk_scale() { return SamplerConfig{}; }
    static SamplerConfig full_scale();
};

struct ChainDiagnostics {
    double mean_accept = 0.0;
    int divergences = 0;
    double step_size = 0.0;
    std::vector<double> split_rhat;  // per parameter, halves of this chain
    std::vector<double> ess;         // per parameter, bulk effective sample size

    double max_rhat() const;
    double min_ess() const;
};

struct PosteriorDraws {
    Matrix draws;                    // (chains * draws_per_chain) x dim
    std::vector<int> chain_of_draw;  // chain id per retained row
    std::vector<ChainDiagnostics> diagnostics;
};

// Returns log density at theta and fills grad with its gradient.
using LogDensityGrad = std::function<double(const Vector&, Vector&)>;

struct PhasePoint {
    Vector theta;
    Vector r;
    Vector grad;
    double logp = 0.0;
};

PhasePoint leapfrog(const LogDensityGrad& target, const PhasePoint& z, double step);

// Produces a chain's starting point from its private stream.
using InitFn = std::function<Vector(RandomStream&)>;

InitFn explicit_init(Vector theta0);
InitFn gaussian_init(Index dim, double scale);

// Dual-averaging step-size adaptation (Hoffman & Gelman 2014, Algorithm 5
// constants: gamma = 0.05, t0 = 10, kappa = 0.75).
class DualAveraging {
public:
    DualAveraging(double init_step_size, double target_accept);
    void observe(double accept_stat);
    double current() const;    // step size for the next warmup iteration
    double adapted() const;    // averaged step size, frozen after warmup
private:
    double mu_;
    double target_;
    double log_step_;
    double log_step_avg_;
    double h_bar_ = 0.0;
    long counter_ = 0;
};

PosteriorDraws nuts_sample(const LogDensityGrad& target, Index dim,
                           const SamplerConfig& config, const InitFn& init,
                           const SeedPath& seed, int workers = 1);

// Potential scale reduction between the two halves of a single chain's series.
double split_rhat_halves(const Vector& series);
// Bulk effective sample size via Geyer's initial monotone positive sequence.
double effective_sample_size(const Vector& series);

std::string draws_to_csv(const PosteriorDraws& draws);
PosteriorDraws draws_from_csv(const std::vector<std::string>& lines);
std::string diagnostics_to_csv(const std::vector<ChainDiagnostics>& diags);

}  // namespace fbnn

#include "fbnn/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fbnn/csv.hpp"

namespace fbnn {

LdlGenerator LdlGenerator::bnn_prior(const BnnSpec& spec) {
    LdlGenerator g;
    g.kind = Kind::BnnPrior;
    g.bnn = spec;
    return g;
}

LdlGenerator LdlGenerator::nngp_prior(const KernelSpec& kernel) {
    LdlGenerator g;
    g.kind = Kind::NngpPrior;
    g.nngp = kernel;
    return g;
}

std::vector<LdlRow> ldl_cdf_study(const LdlGenerator& generator, const GpModel& evaluator,
                                  int s_count, double sigma_eps, const SeedPath& seed) {
    if (s_count < 1) throw std::invalid_argument("ldl_cdf_study: S must be >= 1");
    evaluator.validate();

    const bool from_bnn = generator.kind == LdlGenerator::Kind::BnnPrior;
    const std::string model = from_bnn ? "bnn" : "nngp";
    const int width = from_bnn ? generator.bnn.width : 0;
    const GpModel gp_gen{generator.nngp, 0.0};

    std::vector<LdlRow> rows;
    rows.reserve(static_cast<std::size_t>(s_count));
    for (int s = 0; s < s_count; ++s) {
        const SeedPath sample_seed = seed.child("sample", static_cast<uint64_t>(s));
        RandomStream design(sample_seed.child("design"));
        const Matrix x = sample_train_design(design);

        Vector f;
        if (from_bnn) {
            RandomStream theta_stream(sample_seed.child("theta"));
            const Vector theta = sample_prior_params(generator.bnn, theta_stream);
            f = forward(generator.bnn, theta, x);
        } else {
            f = gp_prior_sample(gp_gen, x, false, sample_seed.child("function"));
        }
        RandomStream noise(sample_seed.child("noise"));
        const Vector y = f + sigma_eps * noise.normal_vector(f.size());

        rows.push_back(LdlRow{model, width, s, log_data_likelihood(evaluator, x, y)});
    }
    return rows;
}

std::vector<double> empirical_cdf(const std::vector<LdlRow>& rows) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& row : rows) values.push_back(row.ldl);
    std::sort(values.begin(), values.end());
    return values;
}

std::string ldl_to_csv(const std::vector<LdlRow>& rows) {
    std::ostringstream out;
    out << "model,width,sample_id,ldl\n";
    for (const auto& row : rows) {
        out << row.model << ',' << row.width << ',' << row.sample_id << ','
            << csv::format_double(row.ldl) << '\n';
    }
    return out.str();
}

FunctionSource FunctionSource::bnn_prior(const BnnSpec& spec) {
    FunctionSource s;
    s.kind = Kind::BnnPrior;
    s.bnn = spec;
    return s;
}

FunctionSource FunctionSource::bnn_posterior(const BnnSpec& spec, Matrix draws) {
    FunctionSource s;
    s.kind = Kind::BnnPosterior;
    s.bnn = spec;
    s.posterior_draws = std::move(draws);
    return s;
}

FunctionSource FunctionSource::nngp_prior(const GpModel& model) {
    FunctionSource s;
    s.kind = Kind::NngpPrior;
    s.gp = model;
    return s;
}

FunctionSource FunctionSource::nngp_posterior(const GpModel& model, Matrix x, Vector y) {
    FunctionSource s;
    s.kind = Kind::NngpPosterior;
    s.gp = model;
    s.x_train = std::move(x);
    s.y_train = std::move(y);
    return s;
}

FunctionSource FunctionSource::data_gp(const GpModel& model, double t) {
    FunctionSource s;
    s.kind = Kind::DataGp;
    s.gp = model;
    s.filter_t = t;
    return s;
}

namespace {

// M exact draws from N(mean, cov) sharing one factorization.
Matrix mvn_draws(const Vector& mean, const Matrix& cov, int m_draws, RandomStream& stream) {
    const auto chol = linalg::cholesky(cov);
    Matrix out(m_draws, mean.size());
    for (int m = 0; m < m_draws; ++m) {
        const Vector z = stream.normal_vector(mean.size());
        out.row(m) = (mean + chol.factor * z).transpose();
    }
    return out;
}

}  // namespace

Matrix draw_functions(const FunctionSource& source, const GridSpec& grid, int m_draws,
                      const SeedPath& seed) {
    if (m_draws < 1) throw std::invalid_argument("draw_functions: M must be >= 1");
    const Matrix grid_x = grid.points_matrix();
    RandomStream stream(seed.child("functions"));

    switch (source.kind) {
        case FunctionSource::Kind::BnnPrior: {
            Matrix out(m_draws, grid_x.rows());
            for (int m = 0; m < m_draws; ++m) {
                const Vector theta = sample_prior_params(source.bnn, stream);
                out.row(m) = forward(source.bnn, theta, grid_x).transpose();
            }
            return out;
        }
        case FunctionSource::Kind::BnnPosterior: {
            const Index available = source.posterior_draws.rows();
            if (available == 0) {
                throw std::invalid_argument("draw_functions: no posterior draws");
            }
            const Index take = std::min<Index>(available, m_draws);
            Matrix out(take, grid_x.rows());
            for (Index m = 0; m < take; ++m) {
                const Index pick = take == available ? m : m * available / take;
                out.row(m) =
                    forward(source.bnn, source.posterior_draws.row(pick), grid_x).transpose();
            }
            return out;
        }
        case FunctionSource::Kind::NngpPrior: {
            const Matrix cov = gram(source.gp.kernel, grid_x);
            return mvn_draws(Vector::Zero(grid_x.rows()), cov, m_draws, stream);
        }
        case FunctionSource::Kind::NngpPosterior: {
            const GpPosterior posterior = gp_fit(source.gp, source.x_train, source.y_train);
            const GpPredictive pred = posterior.predict(grid_x);
            return mvn_draws(pred.mean, pred.cov, m_draws, stream);
        }
        case FunctionSource::Kind::DataGp: {
            const Matrix cov = gram(source.gp.kernel, grid_x);
            Matrix out = mvn_draws(Vector::Zero(grid_x.rows()), cov, m_draws, stream);
            if (source.filter_t > 0.0) {
                const DctPlan plan = dct_plan(grid.n_grid);
                for (Index m = 0; m < out.rows(); ++m) {
                    out.row(m) = lowpass_apply(plan, source.filter_t, out.row(m)).transpose();
                }
            }
            return out;
        }
    }
    throw std::logic_error("draw_functions: unreachable");
}

SpectrumSummary spectrum_study(const FunctionSource& source, const GridSpec& grid,
                               int m_draws, const std::vector<double>& percentiles,
                               const SeedPath& seed) {
    if (m_draws < 2) throw std::invalid_argument("spectrum_study: M must be >= 2");
    const Matrix functions = draw_functions(source, grid, m_draws, seed);
    const DctPlan plan = dct_plan(grid.n_grid);
    return spectrum_percentiles(functions, plan, percentiles);
}

std::string spectrum_csv_header() {
    return "phase,model,width,coeff_index,percentile,value\n";
}

std::string spectrum_rows(const std::string& phase, const std::string& model, int width,
                          const SpectrumSummary& summary) {
    std::ostringstream out;
    for (Index i = 0; i < summary.values.rows(); ++i) {
        for (std::size_t p = 0; p < summary.percentiles.size(); ++p) {
            out << phase << ',' << model << ',' << width << ',' << i << ','
                << csv::format_double(summary.percentiles[p]) << ','
                << csv::format_double(summary.values(i, static_cast<Index>(p))) << '\n';
        }
    }
    return out.str();
}

KernelSpec nngp_model_select(KernelFamily family, const std::vector<double>& grid,
                             double noise_var, const Dataset& ds) {
    if (grid.empty()) throw std::invalid_argument("nngp_model_select: empty grid");
    if (!ds.has_valid()) {
        throw std::invalid_argument("nngp_model_select: dataset has no validation split");
    }

    auto make_spec = [&](double value) {
        KernelSpec spec;
        spec.family = family;
        if (family == KernelFamily::Rbf) {
            spec.lengthscale = value;
        } else {
            spec.sigma_w2 = value;
            spec.sigma_b2 = value;
        }
        spec.validate();
        return spec;
    };

    double best_value = 0.0;
    double best_mse = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const double value : grid) {
        const KernelSpec spec = make_spec(value);
        const GpPosterior posterior = gp_fit(GpModel{spec, noise_var}, ds.x_train, ds.y_train);
        const Vector mean = posterior.predict(ds.x_valid).mean;
        const double mse =
            (mean - ds.y_valid).squaredNorm() / static_cast<double>(ds.y_valid.size());
        if (!found || mse < best_mse || (mse == best_mse && value < best_value)) {
            best_value = value;
            best_mse = mse;
            found = true;
        }
    }
    return make_spec(best_value);
}

}  // namespace fbnn

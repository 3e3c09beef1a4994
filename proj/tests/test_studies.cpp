#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "fbnn/csv.hpp"
#include "fbnn/studies.hpp"

using fbnn::BnnSpec;
using fbnn::Dataset;
using fbnn::FunctionSource;
using fbnn::GpModel;
using fbnn::GridSpec;
using fbnn::LdlGenerator;
using fbnn::KernelFamily;
using fbnn::KernelSpec;
using fbnn::Matrix;
using fbnn::Vector;
using fbnn::RandomStream;
using fbnn::SeedPath;

namespace {

BnnSpec bnn(int width, fbnn::Activation act = fbnn::Activation::Erf) {
    BnnSpec spec;
    spec.width = width;
    spec.activation = act;
    spec.sigma_w2 = 2.0;
    spec.sigma_b2 = 1.0;
    spec.noise_var = 0.01;
    return spec;
}

double mean_of(const std::vector<fbnn::LdlRow>& rows) {
    double acc = 0.0;
    for (const auto& r : rows) {
        acc += r.ldl;
    }
    return acc / static_cast<double>(rows.size());
}

double sd_of(const std::vector<fbnn::LdlRow>& rows) {
    double m = mean_of(rows);
    double acc = 0.0;
    for (const auto& r : rows) {
        acc += (r.ldl - m) * (r.ldl - m);
    }
    return std::sqrt(acc / static_cast<double>(rows.size() - 1));
}

// Dataset with a validation split whose targets come from one joint GP draw.
Dataset valid_dataset(const KernelSpec& kernel, int n_train, int n_valid,
                      const SeedPath& seed) {
    RandomStream s(seed);
    Matrix x_all(n_train + n_valid, 1);
    for (int i = 0; i < x_all.rows(); ++i) {
        x_all(i, 0) = 6.0 * s.uniform() - 3.0;
    }
    GpModel gp{kernel, 0.0};
    Vector f = fbnn::gp_prior_sample(gp, x_all, false, s);
    Dataset ds;
    ds.id = "sel";
    ds.x_train = x_all.topRows(n_train);
    ds.y_train = f.head(n_train);
    ds.x_valid = x_all.bottomRows(n_valid);
    ds.y_valid = f.tail(n_valid);
    for (int i = 0; i < n_train; ++i) ds.y_train(i) += 0.1 * s.normal();
    for (int i = 0; i < n_valid; ++i) ds.y_valid(i) += 0.1 * s.normal();
    ds.x_test = Matrix::Zero(1, 1);
    ds.f_test = Vector::Zero(1);
    return ds;
}

}  // namespace

TEST_CASE("ldl scores are reproducible and the CDF is sorted") {
    GpModel evaluator{KernelSpec::rbf(2.0), 0.01};
    auto gen = LdlGenerator::bnn_prior(bnn(2, fbnn::Activation::Relu));
    auto rows = fbnn::ldl_cdf_study(gen, evaluator, 40, 0.1, SeedPath(131));
    auto rows2 = fbnn::ldl_cdf_study(gen, evaluator, 40, 0.1, SeedPath(131));
    REQUIRE(rows.size() == 40);
    for (int i = 0; i < 40; ++i) {
        CHECK(rows[i].ldl == rows2[i].ldl);
        CHECK(rows[i].sample_id == i);
        CHECK(rows[i].model == "bnn");
        CHECK(rows[i].width == 2);
    }
    auto cdf = fbnn::empirical_cdf(rows);
    REQUIRE(cdf.size() == 40);
    for (size_t i = 1; i < cdf.size(); ++i) {
        CHECK(cdf[i] >= cdf[i - 1]);
    }
}

TEST_CASE("a single-sample study degenerates cleanly") {
    GpModel evaluator{KernelSpec::rbf(2.0), 0.01};
    auto rows = fbnn::ldl_cdf_study(LdlGenerator::nngp_prior(KernelSpec::arcsin(2.0, 1.0)),
                                    evaluator, 1, 0.1, SeedPath(132));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].model == "nngp");
    CHECK(std::isfinite(rows[0].ldl));
}

TEST_CASE("ldl self-consistency: scoring the generator's own model") {
    // Data generated from the evaluator itself: mean LDL across seeds should
    // agree within Monte Carlo error.
    GpModel evaluator{KernelSpec::rbf(2.0), 0.01};
    auto gen = LdlGenerator::nngp_prior(KernelSpec::rbf(2.0));
    auto a = fbnn::ldl_cdf_study(gen, evaluator, 200, 0.1, SeedPath(133).child("a"));
    auto b = fbnn::ldl_cdf_study(gen, evaluator, 200, 0.1, SeedPath(133).child("b"));
    double se = std::sqrt(sd_of(a) * sd_of(a) / 200 + sd_of(b) * sd_of(b) / 200);
    CHECK(std::abs(mean_of(a) - mean_of(b)) < 3.0 * se);
}

TEST_CASE("ldl CSV layout") {
    fbnn::LdlRow r;
    r.model = "bnn";
    r.width = 2;
    r.sample_id = 7;
    r.ldl = -12.5;
    std::string text = fbnn::ldl_to_csv({r});
    auto lines = fbnn::csv::split(text, '\n');
    CHECK(lines[0] == "model,width,sample_id,ldl");
    CHECK(lines[1] == "bnn,2,7,-12.5");
}

TEST_CASE("function draws are reproducible per seed") {
    GridSpec grid = fbnn::make_grid(-3.5, 3.5, 32);
    auto src = FunctionSource::nngp_prior(GpModel{KernelSpec::arcsin(2.0, 1.0), 0.0});
    Matrix a = fbnn::draw_functions(src, grid, 5, SeedPath(134));
    Matrix b = fbnn::draw_functions(src, grid, 5, SeedPath(134));
    REQUIRE(a.rows() == 5);
    REQUIRE(a.cols() == 32);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bnn prior draws run through the network forward map") {
    GridSpec grid = fbnn::make_grid(-3.5, 3.5, 16);
    BnnSpec spec = bnn(4, fbnn::Activation::Relu);
    auto src = FunctionSource::bnn_prior(spec);
    Matrix f = fbnn::draw_functions(src, grid, 3, SeedPath(135));
    REQUIRE(f.rows() == 3);
    REQUIRE(f.cols() == 16);
    CHECK(f.allFinite());
    CHECK(f.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("posterior parameter draws are subsampled evenly") {
    GridSpec grid = fbnn::make_grid(-1.0, 1.0, 8);
    BnnSpec spec = bnn(2);
    RandomStream s(SeedPath(136).child("draws"));
    Matrix draws(10, spec.param_count());
    for (int i = 0; i < 10; ++i) {
        draws.row(i) = fbnn::sample_prior_params(spec, s).transpose();
    }
    auto src = FunctionSource::bnn_posterior(spec, draws);
    Matrix f3 = fbnn::draw_functions(src, grid, 3, SeedPath(136));
    REQUIRE(f3.rows() == 3);
    // Row 0 must be the forward pass of parameter draw 0.
    Vector f0 = fbnn::forward(spec, draws.row(0).transpose(), grid.points_matrix());
    CHECK((f3.row(0).transpose() - f0).cwiseAbs().maxCoeff() == 0.0);

    Matrix fall = fbnn::draw_functions(src, grid, 50, SeedPath(136));
    REQUIRE(fall.rows() == 10);  // capped at what is available
}

TEST_CASE("two disjoint NNGP prior batches have matching spectra") {
    GridSpec grid = fbnn::make_grid(-3.5, 3.5, 64);
    auto src = FunctionSource::nngp_prior(GpModel{KernelSpec::arccos(2.0, 1.0), 0.0});
    auto sa = fbnn::spectrum_study(src, grid, 2000, {50.0}, SeedPath(137).child("a"));
    auto sb = fbnn::spectrum_study(src, grid, 2000, {50.0}, SeedPath(137).child("b"));
    // Compare medians of the first few coefficients in relative terms.
    for (int i = 0; i < 5; ++i) {
        double ra = sa.values(i, 0), rb = sb.values(i, 0);
        CHECK(std::abs(ra - rb) / std::max(std::abs(ra), std::abs(rb)) < 0.1);
    }
}

TEST_CASE("data-gp source filters each function draw") {
    GridSpec grid = fbnn::make_grid(-3.5, 3.5, 32);
    double t = 0.5;
    auto src = FunctionSource::data_gp(GpModel{KernelSpec::rbf(0.5), 0.0}, t);
    Matrix f = fbnn::draw_functions(src, grid, 4, SeedPath(138));
    fbnn::DctPlan plan = fbnn::dct_plan(32);
    int kept = fbnn::lowpass_kept_count(32, t);
    for (int m = 0; m < 4; ++m) {
        Vector a = fbnn::dct_forward(plan, f.row(m).transpose());
        CHECK(a.tail(32 - kept).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("nngp posterior draws concentrate near the training data") {
    GridSpec grid = fbnn::make_grid(-3.5, 3.5, 64);
    GpModel gp{KernelSpec::rbf(1.0), 0.01};
    Matrix x(3, 1);
    x << -1.0, 0.0, 1.0;
    Vector y(3);
    y << 1.0, 1.5, 1.0;
    auto src = FunctionSource::nngp_posterior(gp, x, y);
    Matrix f = fbnn::draw_functions(src, grid, 400, SeedPath(139));
    // At the grid point closest to x = 0 the sample mean should be near 1.5.
    Vector pts = grid.points();
    int j0 = 0;
    for (int j = 1; j < 64; ++j) {
        if (std::abs(pts(j)) < std::abs(pts(j0))) j0 = j;
    }
    double mean0 = f.col(j0).mean();
    CHECK(std::abs(mean0 - 1.5) < 0.3);
}

TEST_CASE("spectrum rows carry the full key") {
    fbnn::SpectrumSummary summary;
    summary.percentiles = {1.0, 99.0};
    summary.values = Matrix(2, 2);
    summary.values << 0.5, 1.5,
                      0.25, 0.75;
    std::string text = fbnn::spectrum_rows("posterior", "bnn", 8, summary);
    auto lines = fbnn::csv::split(text, '\n');
    CHECK(fbnn::spectrum_csv_header() == "phase,model,width,coeff_index,percentile,value\n");
    CHECK(lines[0] == "posterior,bnn,8,0,1,0.5");
    CHECK(lines[1] == "posterior,bnn,8,0,99,1.5");
    CHECK(lines[2] == "posterior,bnn,8,1,1,0.25");
    CHECK(lines[3] == "posterior,bnn,8,1,99,0.75");
}

TEST_CASE("model selection with one candidate returns it") {
    Dataset ds = valid_dataset(KernelSpec::rbf(1.0), 30, 15, SeedPath(140));
    KernelSpec pick = fbnn::nngp_model_select(KernelFamily::Rbf, {0.7}, 0.01, ds);
    CHECK(pick.family == KernelFamily::Rbf);
    CHECK(pick.lengthscale == 0.7);
}

TEST_CASE("model selection prefers the generating lengthscale") {
    int wins = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
        Dataset ds = valid_dataset(KernelSpec::rbf(1.0), 40, 20,
                                   SeedPath(141).child("trial", trial));
        KernelSpec pick =
            fbnn::nngp_model_select(KernelFamily::Rbf, {0.25, 1.0, 4.0}, 0.01, ds);
        wins += pick.lengthscale == 1.0;
    }
    CHECK(wins > trials / 2);
}

TEST_CASE("model selection breaks exact ties toward the smaller value") {
    Dataset ds = valid_dataset(KernelSpec::rbf(1.0), 20, 10, SeedPath(142));
    KernelSpec pick = fbnn::nngp_model_select(KernelFamily::Rbf, {0.8, 0.8}, 0.01, ds);
    CHECK(pick.lengthscale == 0.8);
    // Duplicated candidates tie exactly; order must not matter.
    KernelSpec pick2 = fbnn::nngp_model_select(KernelFamily::Rbf, {1.3, 1.3, 0.9}, 0.01, ds);
    KernelSpec pick3 = fbnn::nngp_model_select(KernelFamily::Rbf, {0.9, 1.3, 1.3}, 0.01, ds);
    CHECK(pick2.lengthscale == pick3.lengthscale);
}

TEST_CASE("model selection for the limiting families sets both variances") {
    Dataset ds = valid_dataset(KernelSpec::arcsin(2.0, 2.0), 30, 15, SeedPath(143));
    KernelSpec pick =
        fbnn::nngp_model_select(KernelFamily::Arcsin, {0.5, 2.0}, 0.01, ds);
    CHECK(pick.family == KernelFamily::Arcsin);
    CHECK(pick.sigma_w2 == pick.sigma_b2);
    CHECK((pick.sigma_w2 == 0.5 || pick.sigma_w2 == 2.0));
}

TEST_CASE("model selection requires a validation split") {
    Dataset ds;
    ds.id = "noval";
    ds.x_train = Matrix::Zero(2, 1);
    ds.y_train = Vector::Zero(2);
    ds.x_test = Matrix::Zero(1, 1);
    ds.f_test = Vector::Zero(1);
    CHECK_THROWS_AS(fbnn::nngp_model_select(KernelFamily::Rbf, {1.0}, 0.01, ds),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        fbnn::nngp_model_select(KernelFamily::Rbf, {},
                                0.01, valid_dataset(KernelSpec::rbf(1.0), 10, 5,
                                                    SeedPath(144))),
        std::invalid_argument);
}

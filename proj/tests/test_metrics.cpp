#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "fbnn/csv.hpp"
#include "fbnn/metrics.hpp"

using fbnn::BnnSpec;
using fbnn::Dataset;
using fbnn::DeltaSummary;
using fbnn::GpModel;
using fbnn::MetricRow;
using fbnn::PairingError;
using fbnn::KernelSpec;
using fbnn::Matrix;
using fbnn::RandomStream;
using fbnn::SeedPath;
using fbnn::Vector;

namespace {

// A width-1 network whose output is the constant b1, regardless of x.
BnnSpec constant_spec(double noise_var) {
    BnnSpec spec;
    spec.width = 1;
    spec.activation = fbnn::Activation::Relu;
    spec.sigma_w2 = 1.0;
    spec.sigma_b2 = 1.0;
    spec.noise_var = noise_var;
    return spec;
}

Vector constant_theta(double c) {
    Vector theta(4);
    theta << 0.0, 0.0, 0.0, c;
    return theta;
}

Dataset tiny_dataset(const Vector& f_test) {
    Dataset ds;
    ds.id = "tiny";
    ds.x_train = Matrix::Zero(1, 1);
    ds.y_train = Vector::Zero(1);
    ds.f_train = Vector::Zero(1);
    ds.x_test = Matrix::Zero(f_test.size(), 1);
    for (int i = 0; i < f_test.size(); ++i) {
        ds.x_test(i, 0) = -1.0 + 2.0 * i / std::max<int>(1, f_test.size() - 1);
    }
    ds.f_test = f_test;
    return ds;
}

MetricRow row(const std::string& id, const std::string& model, int width, double t,
              double nll, double mse) {
    MetricRow r;
    r.dataset_id = id;
    r.model = model;
    r.width = width;
    r.t = t;
    r.nll = nll;
    r.mse = mse;
    return r;
}

}  // namespace

TEST_CASE("single perfect draw scores the pure noise NLL") {
    BnnSpec spec = constant_spec(1.0);
    Matrix draws(1, 4);
    draws.row(0) = constant_theta(2.0).transpose();
    Dataset ds = tiny_dataset(Vector::Constant(3, 2.0));
    MetricRow r = fbnn::evaluate_bnn(spec, draws, ds);
    CHECK(r.mse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.nll == doctest::Approx(0.9189385332046727).epsilon(1e-12));
    CHECK(r.model == "bnn");
    CHECK(r.width == 1);
}

TEST_CASE("two-draw mixture NLL matches a hand log-mean-exp") {
    BnnSpec spec = constant_spec(0.25);
    Matrix draws(2, 4);
    draws.row(0) = constant_theta(1.0).transpose();
    draws.row(1) = constant_theta(2.0).transpose();
    Vector f_test(1);
    f_test << 1.4;
    Dataset ds = tiny_dataset(f_test);
    MetricRow r = fbnn::evaluate_bnn(spec, draws, ds);

    auto comp = [&](double mean) {
        double v = 0.25;
        return std::exp(-0.5 * (1.4 - mean) * (1.4 - mean) / v) / std::sqrt(2 * M_PI * v);
    };
    double want_nll = -std::log(0.5 * (comp(1.0) + comp(2.0)));
    CHECK(r.nll == doctest::Approx(want_nll).epsilon(1e-12));
    // Predictive mean is 1.5, so MSE = 0.01.
    CHECK(r.mse == doctest::Approx(0.01).epsilon(1e-10));
}

TEST_CASE("mixture NLL respects the log-mean-exp bound against moment matching") {
    RandomStream s(SeedPath(121).child("bound"));
    BnnSpec spec;
    spec.width = 6;
    spec.activation = fbnn::Activation::Erf;
    spec.sigma_w2 = 2.0;
    spec.sigma_b2 = 1.0;
    spec.noise_var = 0.01;
    const int m = 40;
    Matrix draws(m, spec.param_count());
    for (int i = 0; i < m; ++i) {
        draws.row(i) = fbnn::sample_prior_params(spec, s).transpose();
    }
    Dataset ds = tiny_dataset(s.normal_vector(7));
    MetricRow exact = fbnn::evaluate_bnn(spec, draws, ds);
    MetricRow mm = fbnn::evaluate_bnn(spec, draws, ds, nullptr, true);
    CHECK(exact.nll >= mm.nll - std::log(static_cast<double>(m)));
    CHECK(exact.mse == doctest::Approx(mm.mse).epsilon(1e-12));
}

TEST_CASE("nngp evaluation matches a hand Gaussian score") {
    // Single train point at 0 with y = 0, single test point far away: the
    // predictive is nearly the prior. Use the exact posterior formula instead
    // of an approximation.
    GpModel model{KernelSpec::rbf(1.0), 0.5};
    Dataset ds;
    ds.id = "gp";
    ds.x_train = Matrix::Zero(1, 1);
    ds.y_train = Vector::Constant(1, 1.0);
    ds.x_test = Matrix::Constant(1, 1, 2.0);
    ds.f_test = Vector::Constant(1, 0.3);

    double k01 = std::exp(-0.5 * 4.0);  // k(0, 2)
    double mean = k01 / 1.5;            // k01 (k00 + noise)^-1 y
    double var = 1.0 - k01 * k01 / 1.5 + 0.5;
    double want_nll = 0.5 * (0.3 - mean) * (0.3 - mean) / var + 0.5 * std::log(var) +
                      0.5 * std::log(2 * M_PI);
    MetricRow r = fbnn::evaluate_nngp(model, ds);
    CHECK(r.nll == doctest::Approx(want_nll).epsilon(1e-10));
    CHECK(r.mse == doctest::Approx((0.3 - mean) * (0.3 - mean)).epsilon(1e-10));
    CHECK(r.model == "nngp");
    CHECK(r.width == 0);
}

TEST_CASE("delta metrics average paired differences") {
    std::vector<MetricRow> bnn{row("a", "bnn", 8, 0.0, 1.0, 1.0),
                               row("b", "bnn", 8, 0.0, 2.0, 3.0)};
    std::vector<MetricRow> nngp{row("a", "nngp", 0, 0.0, 0.0, 0.5),
                                row("b", "nngp", 0, 0.0, 1.0, 1.5)};
    auto deltas = fbnn::delta_metrics(bnn, nngp);
    REQUIRE(deltas.size() == 1);
    CHECK(deltas[0].width == 8);
    CHECK(deltas[0].s_count == 2);
    CHECK(deltas[0].delta_nll == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(deltas[0].delta_mse == doctest::Approx(1.0).epsilon(1e-12));
    // Differences are exactly (1,1) for nll: sd 0 -> se 0.
    CHECK(deltas[0].delta_nll_se == doctest::Approx(0.0).epsilon(1e-12));
    // MSE differences are (0.5, 1.5): sd = sqrt(0.5), se = 0.5.
    CHECK(deltas[0].delta_mse_se == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("delta metrics key groups by width and t") {
    std::vector<MetricRow> bnn{row("a", "bnn", 8, 0.0, 1.0, 1.0),
                               row("a", "bnn", 32, 0.0, 0.5, 0.5),
                               row("a", "bnn", 8, 0.91, 2.0, 2.0)};
    std::vector<MetricRow> nngp{row("a", "nngp", 0, 0.0, 0.0, 0.0)};
    auto deltas = fbnn::delta_metrics(bnn, nngp);
    REQUIRE(deltas.size() == 3);
    // Sorted by (width, t).
    CHECK(deltas[0].width == 8);
    CHECK(deltas[0].t == 0.0);
    CHECK(deltas[1].width == 8);
    CHECK(deltas[1].t == doctest::Approx(0.91));
    CHECK(deltas[2].width == 32);
}

TEST_CASE("paired-difference identity holds") {
    RandomStream s(SeedPath(122).child("pair"));
    std::vector<MetricRow> bnn, nngp;
    double bnn_nll_sum = 0.0, nngp_nll_sum = 0.0;
    for (int i = 0; i < 7; ++i) {
        std::string id = "d" + std::to_string(i);
        double bn = s.normal(), nn = s.normal();
        bnn.push_back(row(id, "bnn", 16, 0.0, bn, s.uniform()));
        nngp.push_back(row(id, "nngp", 0, 0.0, nn, s.uniform()));
        bnn_nll_sum += bn;
        nngp_nll_sum += nn;
    }
    auto deltas = fbnn::delta_metrics(bnn, nngp);
    REQUIRE(deltas.size() == 1);
    double want = bnn_nll_sum / 7 - nngp_nll_sum / 7;
    CHECK(std::abs(deltas[0].delta_nll - want) < 1e-12);
}

TEST_CASE("unpaired rows raise PairingError") {
    std::vector<MetricRow> bnn{row("a", "bnn", 8, 0.0, 1.0, 1.0),
                               row("missing", "bnn", 8, 0.0, 1.0, 1.0)};
    std::vector<MetricRow> nngp{row("a", "nngp", 0, 0.0, 0.0, 0.0)};
    try {
        fbnn::delta_metrics(bnn, nngp);
        FAIL("expected PairingError");
    } catch (const PairingError& e) {
        CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }

    CHECK_THROWS_AS(fbnn::delta_metrics({}, nngp), PairingError);
    std::vector<MetricRow> dup{row("a", "nngp", 0, 0.0, 0.0, 0.0),
                               row("a", "nngp", 0, 0.0, 0.0, 0.0)};
    CHECK_THROWS_AS(fbnn::delta_metrics(bnn, dup), PairingError);
}

TEST_CASE("a group must cover every reference dataset") {
    std::vector<MetricRow> bnn{row("a", "bnn", 8, 0.0, 1.0, 1.0)};
    std::vector<MetricRow> nngp{row("a", "nngp", 0, 0.0, 0.0, 0.0),
                                row("b", "nngp", 0, 0.0, 0.0, 0.0)};
    CHECK_THROWS_AS(fbnn::delta_metrics(bnn, nngp), PairingError);
}

TEST_CASE("metrics CSV round-trips") {
    std::vector<MetricRow> rows{row("a", "bnn", 8, 0.91, 1.25, 0.125),
                                row("a", "nngp", 0, 0.0, -0.5, 2.0)};
    std::string text = fbnn::metrics_to_csv(rows);
    auto lines = fbnn::csv::split(text, '\n');
    while (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    CHECK(lines[0] == "dataset_id,model,width,t,nll,mse");
    auto back = fbnn::metrics_from_csv(lines);
    REQUIRE(back.size() == 2);
    CHECK(back[0].dataset_id == "a");
    CHECK(back[0].model == "bnn");
    CHECK(back[0].width == 8);
    CHECK(back[0].t == 0.91);
    CHECK(back[0].nll == 1.25);
    CHECK(back[1].mse == 2.0);
}

TEST_CASE("delta CSV has the documented column order") {
    DeltaSummary d;
    d.width = 8;
    d.t = 0.5;
    d.delta_nll = 0.1;
    d.delta_nll_se = 0.02;
    d.delta_mse = -0.3;
    d.delta_mse_se = 0.04;
    d.s_count = 20;
    std::string text = fbnn::deltas_to_csv({d});
    auto lines = fbnn::csv::split(text, '\n');
    CHECK(lines[0] == "width,t,delta_nll,delta_nll_se,delta_mse,delta_mse_se,S");
    CHECK(lines[1] == "8,0.5,0.1,0.02,-0.3,0.04,20");
}

TEST_CASE("filtered evaluation reads predictions at snapped test points") {
    BnnSpec spec = constant_spec(0.04);
    Matrix draws(1, 4);
    draws.row(0) = constant_theta(3.0).transpose();

    fbnn::GridSpec grid = fbnn::make_grid(-3.5, 3.5, 64);
    Dataset ds = tiny_dataset(Vector::Constant(4, 3.0));
    auto ctx = fbnn::make_lowpass_context(grid, 0.0, ds.x_test);
    MetricRow r = fbnn::evaluate_bnn(spec, draws, ds, &ctx);
    // Constant function is unaffected by snapping or by keeping everything.
    CHECK(r.mse == doctest::Approx(0.0).epsilon(1e-12));

    // Full filtering wipes the constant to zero, so the MSE is 9.
    auto ctx1 = fbnn::make_lowpass_context(grid, 1.0, ds.x_test);
    MetricRow r1 = fbnn::evaluate_bnn(spec, draws, ds, &ctx1);
    CHECK(r1.mse == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(r1.t == 1.0);
}

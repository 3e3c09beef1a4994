#include <doctest.h>

#include <string>

#include "fbnn/config.hpp"

using fbnn::ConfigError;
using fbnn::KernelFamily;
using fbnn::RunConfig;

namespace {

const char* kFullExample = R"(# run configuration
[run]
seed = 1234
out_dir = results
s_count = 5
workers = 2

[data]
kernel = rbf
lengthscale = 0.5
sigma_eps = 0.1

[models]
nngp = true
widths = 8, 32
activation = relu
sigma_w2 = 2.0
sigma_b2 = 2.0
noise_var = 0.01

[sampler]
chains = 2
warmup = 200
kept = 400
thin = 5
target_accept = 0.8

[filter]
ts = 0, 0.91

[spectrum]
enabled = true
m_draws = 100
dataset = syn000

[ldl]
enabled = true
s_count = 50
widths = 2
evaluator_kernel = rbf
evaluator_lengthscale = 2.0
)";

}  // namespace

TEST_CASE("a full configuration file parses") {
    RunConfig cfg = RunConfig::from_string(kFullExample);
    CHECK(cfg.seed == 1234);
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.s_count == 5);
    CHECK(cfg.workers == 2);
    CHECK(cfg.data.has_kernel);
    CHECK(cfg.data.kernel.family == KernelFamily::Rbf);
    CHECK(cfg.data.kernel.lengthscale == 0.5);
    CHECK(cfg.data.sigma_eps == 0.1);
    REQUIRE(cfg.models.widths.size() == 2);
    CHECK(cfg.models.widths[0] == 8);
    CHECK(cfg.models.widths[1] == 32);
    CHECK(cfg.models.activation == fbnn::Activation::Relu);
    CHECK(cfg.sampler.chains == 2);
    CHECK(cfg.sampler.kept == 400);
    REQUIRE(cfg.filter.ts.size() == 2);
    CHECK(cfg.filter.ts[1] == 0.91);
    CHECK(cfg.spectrum.enabled);
    CHECK(cfg.spectrum.m_draws == 100);
    CHECK(cfg.spectrum.dataset == "syn000");
    CHECK(cfg.ldl.enabled);
    CHECK(cfg.ldl.s_count == 50);
    CHECK(cfg.ldl.evaluator.lengthscale == 2.0);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("defaults cover everything but the data section") {
    RunConfig cfg = RunConfig::from_string("[data]\nkernel = rbf\nlengthscale = 1.0\n");
    CHECK(cfg.sampler.chains == 4);
    CHECK(cfg.sampler.warmup == 1000);
    CHECK(cfg.sampler.kept == 2500);
    CHECK(cfg.sampler.thin == 5);
    CHECK(cfg.s_count == 20);
    CHECK(cfg.models.nngp);
    CHECK(cfg.models.widths.empty());
    CHECK(cfg.filter.ts.size() == 1);
    CHECK(cfg.filter.ts[0] == 0.0);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("unknown keys name their section") {
    try {
        RunConfig::from_string("[data]\nkernel = rbf\nlengthscale = 1\nbogus = 3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("data.bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(RunConfig::from_string("[nope]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_string("orphan = 1\n"), ConfigError);
}

TEST_CASE("synthetic runs demand a data kernel") {
    RunConfig cfg = RunConfig::from_string("[models]\nwidths = 8\n");
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("kernel") != std::string::npos);
    }
}

TEST_CASE("real-data runs demand a target column") {
    RunConfig cfg =
        RunConfig::from_string("[data]\nsource = /tmp/data.csv\n[models]\nwidths = 4\n");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    RunConfig ok = RunConfig::from_string(
        "[data]\nsource = /tmp/data.csv\ntarget_column = y\n[models]\nwidths = 4\n");
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("filter thresholds must stay in range") {
    RunConfig cfg = RunConfig::from_string(
        "[data]\nkernel = rbf\nlengthscale = 1\n[filter]\nts = 0, 1.5\n");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("at least one model family must be active") {
    RunConfig cfg = RunConfig::from_string(
        "[data]\nkernel = rbf\nlengthscale = 1\n[models]\nnngp = false\n");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("bad sampler settings surface as config errors") {
    RunConfig cfg = RunConfig::from_string(
        "[data]\nkernel = rbf\nlengthscale = 1\n[sampler]\nkept = 7\nthin = 5\n");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("full-scale switch raises the budgets") {
    RunConfig cfg = RunConfig::from_string("[data]\nkernel = rbf\nlengthscale = 1\n");
    cfg.apply_full_scale();
    CHECK(cfg.s_count == 200);
    CHECK(cfg.sampler.warmup == 10000);
    CHECK(cfg.sampler.kept == 40000);
    CHECK(cfg.sampler.thin == 5);
}

TEST_CASE("derived model builders use the models section") {
    RunConfig cfg = RunConfig::from_string(kFullExample);
    fbnn::BnnSpec spec = cfg.bnn_spec(32);
    CHECK(spec.width == 32);
    CHECK(spec.activation == fbnn::Activation::Relu);
    CHECK(spec.sigma_w2 == 2.0);
    CHECK(spec.noise_var == 0.01);
    fbnn::GpModel gp = cfg.nngp_model();
    CHECK(gp.kernel.family == KernelFamily::Arccos);
    CHECK(gp.noise_var == 0.01);
    fbnn::GridSpec grid = cfg.grid();
    CHECK(grid.n_grid == 256);
    CHECK(grid.lo == -3.5);
}

TEST_CASE("arcsin data kernels parse their variances") {
    RunConfig cfg = RunConfig::from_string(
        "[data]\nkernel = arcsin\nsigma_w2 = 2.0\nsigma_b2 = 1.0\nfilter_t = 0.5\n");
    CHECK(cfg.data.kernel.family == KernelFamily::Arcsin);
    CHECK(cfg.data.kernel.sigma_w2 == 2.0);
    CHECK(cfg.data.filter_t == 0.5);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("comments and blank lines are ignored") {
    RunConfig cfg = RunConfig::from_string(
        "# leading comment\n\n[data]\n# inner\nkernel = rbf\nlengthscale = 1\n\n");
    CHECK(cfg.data.has_kernel);
}

TEST_CASE("malformed numerics are config errors") {
    CHECK_THROWS_AS(
        RunConfig::from_string("[data]\nkernel = rbf\nlengthscale = wide\n"),
        ConfigError);
    CHECK_THROWS_AS(RunConfig::from_string("[run]\nseed = -3\n"), ConfigError);
}

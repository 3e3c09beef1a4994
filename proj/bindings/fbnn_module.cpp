#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>

#include "fbnn/bnn.hpp"
#include "fbnn/config.hpp"
#include "fbnn/csv.hpp"
#include "fbnn/dataset.hpp"
#include "fbnn/dct.hpp"
#include "fbnn/gp.hpp"
#include "fbnn/kernels.hpp"
#include "fbnn/lowpass.hpp"
#include "fbnn/metrics.hpp"
#include "fbnn/nuts.hpp"
#include "fbnn/rng.hpp"
#include "fbnn/runner.hpp"
#include "fbnn/studies.hpp"

namespace py = pybind11;
using namespace fbnn;

namespace {

// Python target returning (logp, grad). Chains must stay on the calling
// thread, so the generic sampler entry point pins workers to 1.
LogDensityGrad wrap_target(const py::function& fn) {
    return [fn](const Vector& theta, Vector& grad) {
        py::tuple out = fn(theta).cast<py::tuple>();
        grad = out[1].cast<Vector>();
        return out[0].cast<double>();
    };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-width Bayesian networks against their limiting Gaussian processes";

    py::register_exception<IoError>(m, "IoError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PairingError>(m, "PairingError", PyExc_RuntimeError);

    // --- seeds and streams -------------------------------------------------
    py::class_<SeedPath>(m, "SeedPath")
        .def(py::init<std::uint64_t>(), py::arg("root"))
        .def("child", &SeedPath::child, py::arg("label"), py::arg("index") = 0)
        .def("derive", &SeedPath::derive);

    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init<const SeedPath&>(), py::arg("seed"))
        .def("uniform", &RandomStream::uniform)
        .def("normal", &RandomStream::normal)
        .def("normal_vector", &RandomStream::normal_vector, py::arg("n"));

    // --- kernels and exact GP inference ------------------------------------
    py::enum_<KernelFamily>(m, "KernelFamily")
        .value("Rbf", KernelFamily::Rbf)
        .value("Arcsin", KernelFamily::Arcsin)
        .value("Arccos", KernelFamily::Arccos);

    py::class_<KernelSpec>(m, "KernelSpec")
        .def(py::init<>())
        .def_static("rbf", &KernelSpec::rbf, py::arg("lengthscale"))
        .def_static("arcsin", &KernelSpec::arcsin, py::arg("sigma_w2"),
                    py::arg("sigma_b2"))
        .def_static("arccos", &KernelSpec::arccos, py::arg("sigma_w2"),
                    py::arg("sigma_b2"))
        .def_readwrite("family", &KernelSpec::family)
        .def_readwrite("lengthscale", &KernelSpec::lengthscale)
        .def_readwrite("sigma_w2", &KernelSpec::sigma_w2)
        .def_readwrite("sigma_b2", &KernelSpec::sigma_b2)
        .def("validate", &KernelSpec::validate);

    m.def("kernel_eval", &kernel_eval, py::arg("spec"), py::arg("x"), py::arg("x2"));
    m.def("gram",
          static_cast<Matrix (*)(const KernelSpec&, const Matrix&)>(&gram),
          py::arg("spec"), py::arg("x"));
    m.def("gram",
          static_cast<Matrix (*)(const KernelSpec&, const Matrix&, const Matrix&)>(
              &gram),
          py::arg("spec"), py::arg("x"), py::arg("x2"));

    py::class_<GpModel>(m, "GpModel")
        .def(py::init<>())
        .def(py::init([](KernelSpec kernel, double noise_var) {
                 return GpModel{std::move(kernel), noise_var};
             }),
             py::arg("kernel"), py::arg("noise_var"))
        .def_readwrite("kernel", &GpModel::kernel)
        .def_readwrite("noise_var", &GpModel::noise_var);

    py::class_<GpPredictive>(m, "GpPredictive")
        .def_readonly("mean", &GpPredictive::mean)
        .def_readonly("cov", &GpPredictive::cov);

    py::class_<GpPosterior>(m, "GpPosterior")
        .def("predict", &GpPosterior::predict, py::arg("xstar"));

    m.def("gp_fit", &gp_fit, py::arg("model"), py::arg("x"), py::arg("y"));
    m.def("gp_prior_sample",
          static_cast<Vector (*)(const GpModel&, const Matrix&, bool,
                                 const SeedPath&)>(&gp_prior_sample),
          py::arg("model"), py::arg("x"), py::arg("include_noise"), py::arg("seed"));
    m.def("log_data_likelihood", &log_data_likelihood, py::arg("model"), py::arg("x"),
          py::arg("y"));

    // --- DCT and low-pass filtering ----------------------------------------
    py::class_<DctPlan>(m, "DctPlan")
        .def_readonly("n", &DctPlan::n)
        .def_readonly("transform", &DctPlan::transform);

    m.def("dct_plan", &dct_plan, py::arg("n"));
    m.def("dct_forward", &dct_forward, py::arg("plan"), py::arg("f"));
    m.def("dct_inverse", &dct_inverse, py::arg("plan"), py::arg("a"));
    m.def("lowpass_kept_count", &lowpass_kept_count, py::arg("n"), py::arg("t"));
    m.def("lowpass_matrix", &lowpass_matrix, py::arg("plan"), py::arg("t"));
    m.def("lowpass_apply", &lowpass_apply, py::arg("plan"), py::arg("t"), py::arg("f"));
    m.def("percentile_of_sorted", &percentile_of_sorted, py::arg("sorted"),
          py::arg("pct"));

    py::class_<SpectrumSummary>(m, "SpectrumSummary")
        .def_readonly("percentiles", &SpectrumSummary::percentiles)
        .def_readonly("values", &SpectrumSummary::values);

    m.def("spectrum_percentiles", &spectrum_percentiles, py::arg("function_samples"),
          py::arg("plan"), py::arg("percentiles"), py::arg("use_magnitude") = true);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("lo", &GridSpec::lo)
        .def_readwrite("hi", &GridSpec::hi)
        .def_readwrite("n_grid", &GridSpec::n_grid)
        .def("spacing", &GridSpec::spacing)
        .def("points", &GridSpec::points)
        .def("points_matrix", &GridSpec::points_matrix);

    m.def("make_grid", &make_grid, py::arg("lo"), py::arg("hi"), py::arg("n_grid"));
    m.def("snap_to_grid", &snap_to_grid, py::arg("grid"), py::arg("x"));

    py::class_<LowpassContext>(m, "LowpassContext")
        .def_readonly("grid", &LowpassContext::grid)
        .def_readonly("t", &LowpassContext::t)
        .def_readonly("selection", &LowpassContext::selection);

    m.def("make_lowpass_context", &make_lowpass_context, py::arg("grid"), py::arg("t"),
          py::arg("x"));

    py::class_<LpfForward>(m, "LpfForward")
        .def_readonly("grid_values", &LpfForward::grid_values)
        .def_readonly("at_data", &LpfForward::at_data);

    m.def("lpf_forward", &lpf_forward, py::arg("spec"), py::arg("theta"),
          py::arg("ctx"));
    m.def("lpf_log_likelihood", &lpf_log_likelihood, py::arg("spec"), py::arg("theta"),
          py::arg("ctx"), py::arg("y"));

    // --- finite-width networks ---------------------------------------------
    py::enum_<Activation>(m, "Activation")
        .value("Erf", Activation::Erf)
        .value("Relu", Activation::Relu);

    py::class_<BnnSpec>(m, "BnnSpec")
        .def(py::init<>())
        .def_readwrite("width", &BnnSpec::width)
        .def_readwrite("activation", &BnnSpec::activation)
        .def_readwrite("input_dim", &BnnSpec::input_dim)
        .def_readwrite("sigma_w2", &BnnSpec::sigma_w2)
        .def_readwrite("sigma_b2", &BnnSpec::sigma_b2)
        .def_readwrite("noise_var", &BnnSpec::noise_var)
        .def("param_count", &BnnSpec::param_count)
        .def("validate", &BnnSpec::validate)
        .def("limiting_kernel", &BnnSpec::limiting_kernel);

    m.def("forward", &forward, py::arg("spec"), py::arg("theta"), py::arg("x"));
    m.def("log_prior", &log_prior, py::arg("spec"), py::arg("theta"));
    m.def("log_likelihood", &log_likelihood, py::arg("spec"), py::arg("theta"),
          py::arg("x"), py::arg("y"));
    m.def("forward_vjp", &forward_vjp, py::arg("spec"), py::arg("theta"), py::arg("x"),
          py::arg("cotangent"));
    m.def(
        "log_joint_and_grad",
        [](const BnnSpec& spec, const Vector& theta, const Matrix& x, const Vector& y,
           const LowpassContext* filter) {
            LogJoint lj = log_joint_and_grad(spec, theta, x, y, filter);
            return py::make_tuple(lj.value, std::move(lj.grad));
        },
        py::arg("spec"), py::arg("theta"), py::arg("x"), py::arg("y"),
        py::arg("filter") = static_cast<const LowpassContext*>(nullptr));
    m.def(
        "sample_prior_params",
        [](const BnnSpec& spec, const SeedPath& seed, double scale) {
            RandomStream stream(seed);
            return sample_prior_params(spec, stream, scale);
        },
        py::arg("spec"), py::arg("seed"), py::arg("scale") = 1.0);
    m.def("predictive_function_draws", &predictive_function_draws, py::arg("spec"),
          py::arg("draws"), py::arg("xstar"));

    // --- sampling -----------------------------------------------------------
    py::class_<SamplerConfig>(m, "SamplerConfig")
        .def(py::init<>())
        .def_static("desk_scale", &SamplerConfig::desk_scale)
        .def_static("full_scale", &SamplerConfig::full_scale)
        .def_readwrite("chains", &SamplerConfig::chains)
        .def_readwrite("warmup", &SamplerConfig::warmup)
        .def_readwrite("kept", &SamplerConfig::kept)
        .def_readwrite("thin", &SamplerConfig::thin)
        .def_readwrite("target_accept", &SamplerConfig::target_accept)
        .def_readwrite("max_tree_depth", &SamplerConfig::max_tree_depth)
        .def_readwrite("init_step_size", &SamplerConfig::init_step_size)
        .def("draws_per_chain", &SamplerConfig::draws_per_chain)
        .def("validate", &SamplerConfig::validate);

    py::class_<ChainDiagnostics>(m, "ChainDiagnostics")
        .def_readonly("mean_accept", &ChainDiagnostics::mean_accept)
        .def_readonly("divergences", &ChainDiagnostics::divergences)
        .def_readonly("step_size", &ChainDiagnostics::step_size)
        .def_readonly("split_rhat", &ChainDiagnostics::split_rhat)
        .def_readonly("ess", &ChainDiagnostics::ess)
        .def("max_rhat", &ChainDiagnostics::max_rhat)
        .def("min_ess", &ChainDiagnostics::min_ess);

    py::class_<PosteriorDraws>(m, "PosteriorDraws")
        .def_readonly("draws", &PosteriorDraws::draws)
        .def_readonly("chain_of_draw", &PosteriorDraws::chain_of_draw)
        .def_readonly("diagnostics", &PosteriorDraws::diagnostics);

    m.def(
        "nuts_sample",
        [](const py::function& target, Index dim, const SamplerConfig& config,
           std::optional<Vector> init, const SeedPath& seed) {
            InitFn init_fn =
                init ? explicit_init(*init) : gaussian_init(dim, 1.0);
            return nuts_sample(wrap_target(target), dim, config, init_fn, seed, 1);
        },
        py::arg("target"), py::arg("dim"), py::arg("config"), py::arg("init"),
        py::arg("seed"),
        "Generic NUTS over a Python callable returning (logp, grad); single "
        "worker.");
    m.def(
        "sample_bnn_posterior",
        [](const BnnSpec& spec, const Matrix& x, const Vector& y,
           const SamplerConfig& config, const SeedPath& seed, int workers,
           const LowpassContext* filter, double init_scale) {
            LogDensityGrad target = [&spec, &x, &y, filter](const Vector& theta,
                                                            Vector& grad) {
                LogJoint lj = log_joint_and_grad(spec, theta, x, y, filter);
                grad = std::move(lj.grad);
                return lj.value;
            };
            py::gil_scoped_release release;
            return nuts_sample(target, spec.param_count(), config,
                               bnn_prior_init(spec, init_scale), seed, workers);
        },
        py::arg("spec"), py::arg("x"), py::arg("y"), py::arg("config"), py::arg("seed"),
        py::arg("workers") = 1,
        py::arg("filter") = static_cast<const LowpassContext*>(nullptr),
        py::arg("init_scale") = 0.1);

    // --- datasets ------------------------------------------------------------
    py::class_<Manifest>(m, "Manifest")
        .def("has", &Manifest::has, py::arg("key"))
        .def("get", &Manifest::get, py::arg("key"))
        .def("entries", &Manifest::entries);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("id", &Dataset::id)
        .def_readonly("x_train", &Dataset::x_train)
        .def_readonly("y_train", &Dataset::y_train)
        .def_readonly("f_train", &Dataset::f_train)
        .def_readonly("x_test", &Dataset::x_test)
        .def_readonly("f_test", &Dataset::f_test)
        .def_readonly("x_valid", &Dataset::x_valid)
        .def_readonly("y_valid", &Dataset::y_valid)
        .def_readonly("manifest", &Dataset::manifest)
        .def("input_dim", &Dataset::input_dim)
        .def("has_valid", &Dataset::has_valid);

    m.def("generate_synthetic_suite", &generate_synthetic_suite, py::arg("kernel"),
          py::arg("s_count"), py::arg("sigma_eps"), py::arg("seed"));
    m.def("lpf_grid_function", &lpf_grid_function, py::arg("gp"), py::arg("grid"),
          py::arg("t"), py::arg("seed"));
    m.def("lpf_gp_dataset", &lpf_gp_dataset, py::arg("gp"), py::arg("grid"),
          py::arg("t"), py::arg("x_train"), py::arg("x_test"), py::arg("sigma_eps"),
          py::arg("seed"));
    m.def("save_dataset", &save_dataset, py::arg("path"), py::arg("ds"));
    m.def("load_dataset", &load_dataset, py::arg("path"));

    // --- metrics -------------------------------------------------------------
    py::class_<MetricRow>(m, "MetricRow")
        .def_readonly("dataset_id", &MetricRow::dataset_id)
        .def_readonly("model", &MetricRow::model)
        .def_readonly("width", &MetricRow::width)
        .def_readonly("t", &MetricRow::t)
        .def_readonly("nll", &MetricRow::nll)
        .def_readonly("mse", &MetricRow::mse);

    py::class_<DeltaSummary>(m, "DeltaSummary")
        .def_readonly("width", &DeltaSummary::width)
        .def_readonly("t", &DeltaSummary::t)
        .def_readonly("delta_nll", &DeltaSummary::delta_nll)
        .def_readonly("delta_nll_se", &DeltaSummary::delta_nll_se)
        .def_readonly("delta_mse", &DeltaSummary::delta_mse)
        .def_readonly("delta_mse_se", &DeltaSummary::delta_mse_se)
        .def_readonly("s_count", &DeltaSummary::s_count);

    m.def("evaluate_bnn", &evaluate_bnn, py::arg("spec"), py::arg("draws"),
          py::arg("ds"), py::arg("filter") = static_cast<const LowpassContext*>(nullptr),
          py::arg("moment_matched") = false);
    m.def("evaluate_nngp", &evaluate_nngp, py::arg("model"), py::arg("ds"));
    m.def("delta_metrics", &delta_metrics, py::arg("bnn_rows"), py::arg("nngp_rows"));

    // --- studies -------------------------------------------------------------
    py::class_<LdlRow>(m, "LdlRow")
        .def_readonly("model", &LdlRow::model)
        .def_readonly("width", &LdlRow::width)
        .def_readonly("sample_id", &LdlRow::sample_id)
        .def_readonly("ldl", &LdlRow::ldl);

    py::class_<LdlGenerator>(m, "LdlGenerator")
        .def_static("bnn_prior", &LdlGenerator::bnn_prior, py::arg("spec"))
        .def_static("nngp_prior", &LdlGenerator::nngp_prior, py::arg("kernel"));

    m.def(
        "ldl_cdf_study",
        [](const LdlGenerator& generator, const GpModel& evaluator, int s_count,
           double sigma_eps, const SeedPath& seed) {
            py::gil_scoped_release release;
            return ldl_cdf_study(generator, evaluator, s_count, sigma_eps, seed);
        },
        py::arg("generator"), py::arg("evaluator"), py::arg("s_count"),
        py::arg("sigma_eps"), py::arg("seed"));
    m.def("empirical_cdf", &empirical_cdf, py::arg("rows"));

    py::class_<FunctionSource>(m, "FunctionSource")
        .def_static("bnn_prior", &FunctionSource::bnn_prior, py::arg("spec"))
        .def_static("bnn_posterior", &FunctionSource::bnn_posterior, py::arg("spec"),
                    py::arg("draws"))
        .def_static("nngp_prior", &FunctionSource::nngp_prior, py::arg("model"))
        .def_static("nngp_posterior", &FunctionSource::nngp_posterior, py::arg("model"),
                    py::arg("x"), py::arg("y"))
        .def_static("data_gp", &FunctionSource::data_gp, py::arg("model"), py::arg("t"));

    m.def("draw_functions", &draw_functions, py::arg("source"), py::arg("grid"),
          py::arg("m_draws"), py::arg("seed"));
    m.def("spectrum_study", &spectrum_study, py::arg("source"), py::arg("grid"),
          py::arg("m_draws"), py::arg("percentiles"), py::arg("seed"));
    m.def("nngp_model_select", &nngp_model_select, py::arg("family"), py::arg("grid"),
          py::arg("noise_var"), py::arg("ds"));

    // --- experiment harness --------------------------------------------------
    py::class_<RunConfig>(m, "RunConfig")
        .def_static("from_file", &RunConfig::from_file, py::arg("path"))
        .def_static("from_string", &RunConfig::from_string, py::arg("text"))
        .def("validate", &RunConfig::validate)
        .def("apply_full_scale", &RunConfig::apply_full_scale)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("out_dir", &RunConfig::out_dir)
        .def_readwrite("s_count", &RunConfig::s_count)
        .def_readwrite("workers", &RunConfig::workers);

    m.def(
        "cmd_gen",
        [](const RunConfig& cfg) {
            py::gil_scoped_release release;
            return cmd_gen(cfg);
        },
        py::arg("cfg"));
    m.def(
        "cmd_fit",
        [](const RunConfig& cfg) {
            py::gil_scoped_release release;
            return cmd_fit(cfg);
        },
        py::arg("cfg"));
    m.def(
        "cmd_report",
        [](const RunConfig& cfg) {
            py::gil_scoped_release release;
            return cmd_report(cfg);
        },
        py::arg("cfg"));
}

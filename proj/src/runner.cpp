#include "fbnn/runner.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "fbnn/csv.hpp"
#include "fbnn/metrics.hpp"
#include "fbnn/nuts.hpp"
#include "fbnn/studies.hpp"
#include "fbnn/tabular.hpp"

namespace fbnn {

namespace {

std::string datasets_dir(const RunConfig& cfg) { return cfg.out_dir + "/datasets"; }
std::string suite_manifest_path(const RunConfig& cfg) {
    return datasets_dir(cfg) + "/suite_manifest.txt";
}
std::string ledger_path(const RunConfig& cfg) { return cfg.out_dir + "/progress.ledger"; }
std::string unit_dir(const RunConfig& cfg) { return cfg.out_dir + "/units"; }
std::string draws_dir(const RunConfig& cfg) { return cfg.out_dir + "/draws"; }

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kExitConfig;
    if (dynamic_cast<const PairingError*>(&e) != nullptr) return kExitPairing;
    if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) return kExitConfig;
    return kExitIo;
}

struct FitUnit {
    std::string key;
    std::string dataset_id;
    std::string model;  // "bnn" or "nngp"
    int width = 0;
    double t = 0.0;
};

std::string metrics_path(const RunConfig& cfg, const FitUnit& unit) {
    return unit_dir(cfg) + "/" + unit.key + ".metrics.csv";
}

std::vector<FitUnit> plan_units(const RunConfig& cfg, const std::vector<Dataset>& suite) {
    std::vector<FitUnit> units;
    for (const auto& ds : suite) {
        if (cfg.models.nngp) {
            units.push_back(FitUnit{unit_key(ds.id, "nngp", 0, 0.0), ds.id, "nngp", 0, 0.0});
        }
        for (const int width : cfg.models.widths) {
            for (const double t : cfg.filter.ts) {
                units.push_back(
                    FitUnit{unit_key(ds.id, "bnn", width, t), ds.id, "bnn", width, t});
            }
        }
    }
    return units;
}

void run_nngp_unit(const RunConfig& cfg, const Dataset& ds, const FitUnit& unit) {
    GpModel model = cfg.nngp_model();
    if (cfg.models.nngp_select && ds.has_valid()) {
        model.kernel = nngp_model_select(model.kernel.family, cfg.models.hyper_grid,
                                         model.noise_var, ds);
    }
    const MetricRow row = evaluate_nngp(model, ds);
    csv::write_file(metrics_path(cfg, unit), metrics_to_csv({row}));
}

void run_bnn_unit(const RunConfig& cfg, const Dataset& ds, const FitUnit& unit) {
    const BnnSpec spec = cfg.bnn_spec(unit.width, static_cast<int>(ds.input_dim()));
    spec.validate();

    LowpassContext train_ctx;
    const bool filtered = unit.t > 0.0;
    if (filtered) {
        train_ctx = make_lowpass_context(cfg.grid(), unit.t, ds.x_train);
    }
    const LowpassContext* ctx_ptr = filtered ? &train_ctx : nullptr;

    const LogDensityGrad target = [&spec, &ds, ctx_ptr](const Vector& theta, Vector& grad) {
        const LogJoint lj = log_joint_and_grad(spec, theta, ds.x_train, ds.y_train, ctx_ptr);
        grad = lj.grad;
        return lj.value;
    };

    const SeedPath unit_seed = SeedPath(cfg.seed).child(unit.key);
    const PosteriorDraws draws =
        nuts_sample(target, spec.param_count(), cfg.sampler,
                    bnn_prior_init(spec), unit_seed, 1);

    csv::write_file(draws_dir(cfg) + "/" + unit.key + ".csv", draws_to_csv(draws));
    Manifest mf;
    mf.set("dataset", ds.id);
    mf.set_int("width", spec.width);
    mf.set("activation", activation_name(spec.activation));
    mf.set_double("sigma_w2", spec.sigma_w2);
    mf.set_double("sigma_b2", spec.sigma_b2);
    mf.set_double("noise_var", spec.noise_var);
    mf.set_int("input_dim", spec.input_dim);
    mf.set_double("t", unit.t);
    mf.set_int("chains", cfg.sampler.chains);
    mf.set_int("warmup", cfg.sampler.warmup);
    mf.set_int("kept", cfg.sampler.kept);
    mf.set_int("thin", cfg.sampler.thin);
    mf.set_double("target_accept", cfg.sampler.target_accept);
    mf.set_int("max_tree_depth", cfg.sampler.max_tree_depth);
    mf.set_double("init_step_size", cfg.sampler.init_step_size);
    std::ostringstream mf_text;
    for (const auto& [k, v] : mf.entries()) mf_text << k << " = " << v << '\n';
    csv::write_file(draws_dir(cfg) + "/" + unit.key + ".manifest", mf_text.str());
    csv::write_file(unit_dir(cfg) + "/" + unit.key + ".diag.csv",
                    diagnostics_to_csv(draws.diagnostics));

    MetricRow row;
    if (filtered) {
        const LowpassContext test_ctx = make_lowpass_context(cfg.grid(), unit.t, ds.x_test);
        row = evaluate_bnn(spec, draws.draws, ds, &test_ctx);
    } else {
        row = evaluate_bnn(spec, draws.draws, ds);
    }
    csv::write_file(metrics_path(cfg, unit), metrics_to_csv({row}));
}

void aggregate_outputs(const RunConfig& cfg, const std::vector<FitUnit>& units) {
    std::vector<MetricRow> rows;
    std::ostringstream diag;
    diag << "unit,chain,mean_accept,divergences,step_size,min_ess,max_rhat\n";
    for (const auto& unit : units) {
        const std::string mpath = metrics_path(cfg, unit);
        if (!csv::file_exists(mpath)) continue;
        for (auto& row : metrics_from_csv(csv::read_lines(mpath))) {
            rows.push_back(std::move(row));
        }
        const std::string dpath = unit_dir(cfg) + "/" + unit.key + ".diag.csv";
        if (csv::file_exists(dpath)) {
            const auto lines = csv::read_lines(dpath);
            for (std::size_t i = 1; i < lines.size(); ++i) {
                if (csv::trim(lines[i]).empty()) continue;
                diag << unit.key << ',' << lines[i] << '\n';
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
        return std::tie(a.dataset_id, a.model, a.width, a.t) <
               std::tie(b.dataset_id, b.model, b.width, b.t);
    });
    csv::write_file(cfg.out_dir + "/metrics.csv", metrics_to_csv(rows));
    csv::write_file(cfg.out_dir + "/diagnostics.csv", diag.str());
}

}  // namespace

std::string unit_key(const std::string& dataset_id, const std::string& model, int width,
                     double t) {
    std::string key = dataset_id + "_" + model;
    if (model == "bnn") {
        key += "_w" + std::to_string(width) + "_t" + csv::format_double(t);
    }
    return key;
}

std::vector<std::string> read_suite_manifest(const std::string& out_dir) {
    std::vector<std::string> ids;
    for (const auto& line : csv::read_lines(out_dir + "/datasets/suite_manifest.txt")) {
        const auto id = csv::trim(line);
        if (!id.empty()) ids.emplace_back(id);
    }
    if (ids.empty()) throw IoError("suite manifest lists no datasets");
    return ids;
}

std::vector<Dataset> load_suite(const RunConfig& cfg) {
    std::vector<Dataset> suite;
    for (const auto& id : read_suite_manifest(cfg.out_dir)) {
        suite.push_back(load_dataset(datasets_dir(cfg) + "/" + id + ".txt"));
    }
    return suite;
}

int cmd_gen(const RunConfig& cfg) {
    try {
        cfg.validate();
        const SeedPath gen_seed = SeedPath(cfg.seed).child("gen");

        std::vector<Dataset> suite;
        if (!cfg.data.source.empty()) {
            suite.push_back(load_tabular(cfg.data.source, cfg.data.target_column,
                                         cfg.data.standardize, gen_seed));
        } else if (cfg.data.filter_t > 0.0) {
            const GpModel generator{cfg.data.kernel, 0.0};
            const GridSpec grid = cfg.grid();
            for (int s = 0; s < cfg.s_count; ++s) {
                const SeedPath ds_seed = gen_seed.child("dataset", static_cast<uint64_t>(s));
                RandomStream design(ds_seed.child("design"));
                const Matrix x_train = sample_train_design(design);
                const Matrix x_test = sample_test_design(design);
                Dataset ds = lpf_gp_dataset(generator, grid, cfg.data.filter_t, x_train,
                                            x_test, cfg.data.sigma_eps, ds_seed);
                ds.id = "syn" + std::string(s < 10 ? "00" : s < 100 ? "0" : "") +
                        std::to_string(s);
                ds.manifest.set_int("s_index", s);
                suite.push_back(std::move(ds));
            }
        } else {
            suite = generate_synthetic_suite(cfg.data.kernel, cfg.s_count,
                                             cfg.data.sigma_eps, gen_seed);
        }

        std::string manifest;
        for (const auto& ds : suite) {
            save_dataset(datasets_dir(cfg) + "/" + ds.id + ".txt", ds);
            manifest += ds.id + "\n";
        }
        csv::write_file(suite_manifest_path(cfg), manifest);
        std::cout << "gen: wrote " << suite.size() << " dataset(s) under "
                  << datasets_dir(cfg) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "gen: error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_fit(const RunConfig& cfg) {
    try {
        cfg.validate();
        const std::vector<Dataset> suite = load_suite(cfg);
        std::map<std::string, const Dataset*> by_id;
        for (const auto& ds : suite) by_id[ds.id] = &ds;
        const std::vector<FitUnit> units = plan_units(cfg, suite);

        std::set<std::string> done;
        if (csv::file_exists(ledger_path(cfg))) {
            for (const auto& line : csv::read_lines(ledger_path(cfg))) {
                const auto key = csv::trim(line);
                if (!key.empty()) done.emplace(key);
            }
        }

        std::mutex ledger_mutex;
        std::atomic<std::size_t> next{0};
        std::atomic<int> failures{0};
        auto work = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= units.size()) return;
                const FitUnit& unit = units[i];
                if (done.count(unit.key) > 0 && csv::file_exists(metrics_path(cfg, unit))) {
                    continue;
                }
                try {
                    const Dataset& ds = *by_id.at(unit.dataset_id);
                    if (unit.model == "nngp") {
                        run_nngp_unit(cfg, ds, unit);
                    } else {
                        run_bnn_unit(cfg, ds, unit);
                    }
                    const std::lock_guard<std::mutex> lock(ledger_mutex);
                    csv::append_file(ledger_path(cfg), unit.key + "\n");
                    csv::write_file(unit_dir(cfg) + "/" + unit.key + ".status", "ok\n");
                } catch (const std::exception& e) {
                    failures.fetch_add(1);
                    const std::lock_guard<std::mutex> lock(ledger_mutex);
                    std::cerr << "fit: unit " << unit.key << " failed: " << e.what() << "\n";
                    csv::write_file(unit_dir(cfg) + "/" + unit.key + ".status",
                                    std::string("error: ") + e.what() + "\n");
                }
            }
        };

        const int pool = std::clamp(cfg.workers, 1, static_cast<int>(units.size()) > 0
                                                        ? static_cast<int>(units.size())
                                                        : 1);
        if (pool <= 1) {
            work();
        } else {
            std::vector<std::thread> threads;
            threads.reserve(static_cast<std::size_t>(pool));
            for (int w = 0; w < pool; ++w) threads.emplace_back(work);
            for (auto& th : threads) th.join();
        }

        aggregate_outputs(cfg, units);
        std::cout << "fit: " << units.size() << " unit(s), " << failures.load()
                  << " failure(s); aggregates under " << cfg.out_dir << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "fit: error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_report(const RunConfig& cfg) {
    try {
        cfg.validate();
        const auto metric_lines = csv::read_lines(cfg.out_dir + "/metrics.csv");
        const auto rows = metrics_from_csv(metric_lines);
        std::vector<MetricRow> bnn_rows, nngp_rows;
        for (const auto& row : rows) {
            (row.model == "bnn" ? bnn_rows : nngp_rows).push_back(row);
        }
        const auto deltas = delta_metrics(bnn_rows, nngp_rows);
        csv::write_file(cfg.out_dir + "/delta.csv", deltas_to_csv(deltas));

        if (cfg.ldl.enabled) {
            const SeedPath ldl_seed = SeedPath(cfg.seed).child("ldl");
            const double noise_var = cfg.data.sigma_eps * cfg.data.sigma_eps;
            const GpModel evaluator{cfg.ldl.evaluator, noise_var};
            std::vector<LdlRow> all;
            for (const int width : cfg.ldl.widths) {
                const auto gen = LdlGenerator::bnn_prior(cfg.bnn_spec(width));
                auto rows_w = ldl_cdf_study(gen, evaluator, cfg.ldl.s_count,
                                            cfg.data.sigma_eps,
                                            ldl_seed.child("bnn", static_cast<uint64_t>(width)));
                all.insert(all.end(), rows_w.begin(), rows_w.end());
            }
            const auto gen = LdlGenerator::nngp_prior(cfg.nngp_model().kernel);
            auto nngp_ldl = ldl_cdf_study(gen, evaluator, cfg.ldl.s_count,
                                          cfg.data.sigma_eps, ldl_seed.child("nngp"));
            all.insert(all.end(), nngp_ldl.begin(), nngp_ldl.end());
            csv::write_file(cfg.out_dir + "/ldl.csv", ldl_to_csv(all));
        }

        if (cfg.spectrum.enabled) {
            const std::vector<std::string> ids = read_suite_manifest(cfg.out_dir);
            const std::string id = cfg.spectrum.dataset.empty() ? ids.front()
                                                                : cfg.spectrum.dataset;
            const Dataset ds = load_dataset(datasets_dir(cfg) + "/" + id + ".txt");
            const GridSpec grid = cfg.grid();
            const SeedPath sp_seed = SeedPath(cfg.seed).child("spectrum");
            std::string body = spectrum_csv_header();

            if (cfg.data.has_kernel) {
                const auto src = FunctionSource::data_gp(GpModel{cfg.data.kernel, 0.0},
                                                         cfg.data.filter_t);
                body += spectrum_rows(
                    "data", "data_gp", 0,
                    spectrum_study(src, grid, cfg.spectrum.m_draws,
                                   cfg.spectrum.percentiles, sp_seed.child("data")));
            }

            const GpModel nngp = cfg.nngp_model();
            body += spectrum_rows(
                "prior", "nngp", 0,
                spectrum_study(FunctionSource::nngp_prior(nngp), grid,
                               cfg.spectrum.m_draws, cfg.spectrum.percentiles,
                               sp_seed.child("nngp-prior")));
            body += spectrum_rows(
                "posterior", "nngp", 0,
                spectrum_study(FunctionSource::nngp_posterior(nngp, ds.x_train, ds.y_train),
                               grid, cfg.spectrum.m_draws, cfg.spectrum.percentiles,
                               sp_seed.child("nngp-post")));

            for (const int width : cfg.models.widths) {
                const BnnSpec spec = cfg.bnn_spec(width, static_cast<int>(ds.input_dim()));
                body += spectrum_rows(
                    "prior", "bnn", width,
                    spectrum_study(FunctionSource::bnn_prior(spec), grid,
                                   cfg.spectrum.m_draws, cfg.spectrum.percentiles,
                                   sp_seed.child("bnn-prior", static_cast<uint64_t>(width))));
                const std::string draws_path =
                    draws_dir(cfg) + "/" + unit_key(id, "bnn", width, 0.0) + ".csv";
                if (!csv::file_exists(draws_path)) {
                    std::cerr << "report: no draws for width " << width
                              << "; skipping its posterior spectrum\n";
                    continue;
                }
                const PosteriorDraws draws = draws_from_csv(csv::read_lines(draws_path));
                body += spectrum_rows(
                    "posterior", "bnn", width,
                    spectrum_study(FunctionSource::bnn_posterior(spec, draws.draws), grid,
                                   cfg.spectrum.m_draws, cfg.spectrum.percentiles,
                                   sp_seed.child("bnn-post", static_cast<uint64_t>(width))));
            }
            csv::write_file(cfg.out_dir + "/spectrum.csv", body);
        }

        std::cout << "report: wrote delta.csv";
        if (cfg.ldl.enabled) std::cout << ", ldl.csv";
        if (cfg.spectrum.enabled) std::cout << ", spectrum.csv";
        std::cout << " under " << cfg.out_dir << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "report: error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace fbnn

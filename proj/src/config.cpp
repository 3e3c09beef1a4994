#include "fbnn/config.hpp"

#include <fstream>
#include <sstream>

#include "fbnn/csv.hpp"

namespace fbnn {

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: " + key + " expects a boolean, got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        return csv::parse_double(value);
    } catch (const IoError&) {
        throw ConfigError("config: " + key + " expects a number, got '" + value + "'");
    }
}

long long parse_integer(const std::string& key, const std::string& value) {
    try {
        return csv::parse_int(value);
    } catch (const IoError&) {
        throw ConfigError("config: " + key + " expects an integer, got '" + value + "'");
    }
}

std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : csv::split(value)) {
        out.push_back(parse_real(key, std::string(csv::trim(item))));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& item : csv::split(value)) {
        out.push_back(static_cast<int>(parse_integer(key, std::string(csv::trim(item)))));
    }
    return out;
}

KernelFamily parse_family(const std::string& key, const std::string& value) {
    try {
        return kernel_family_from_name(value);
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " expects rbf|arcsin|arccos, got '" + value +
                          "'");
    }
}

}  // namespace

RunConfig RunConfig::from_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line{csv::trim(raw)};
        const std::size_t comment = line.find('#');
        if (comment != std::string::npos) line = std::string(csv::trim(line.substr(0, comment)));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config: malformed section header on line " +
                                  std::to_string(line_no));
            }
            section = line.substr(1, line.size() - 2);
            if (section != "run" && section != "data" && section != "models" &&
                section != "sampler" && section != "filter" && section != "spectrum" &&
                section != "ldl") {
                throw ConfigError("config: unknown section [" + section + "]");
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key = value on line " +
                              std::to_string(line_no));
        }
        const std::string key{csv::trim(line.substr(0, eq))};
        const std::string value{csv::trim(line.substr(eq + 1))};
        if (section.empty()) {
            throw ConfigError("config: key '" + key + "' appears before any section");
        }
        const std::string full = section + "." + key;

        if (section == "run") {
            if (key == "seed") {
                const long long raw = parse_integer(full, value);
                if (raw < 0) throw ConfigError("config: run.seed must be nonnegative");
                cfg.seed = static_cast<uint64_t>(raw);
            }
            else if (key == "out_dir") cfg.out_dir = value;
            else if (key == "s_count") cfg.s_count = static_cast<int>(parse_integer(full, value));
            else if (key == "workers") cfg.workers = static_cast<int>(parse_integer(full, value));
            else throw ConfigError("config: unknown key " + full);
        } else if (section == "data") {
            if (key == "kernel") {
                cfg.data.kernel.family = parse_family(full, value);
                cfg.data.has_kernel = true;
            } else if (key == "lengthscale") cfg.data.kernel.lengthscale = parse_real(full, value);
            else if (key == "sigma_w2") cfg.data.kernel.sigma_w2 = parse_real(full, value);
            else if (key == "sigma_b2") cfg.data.kernel.sigma_b2 = parse_real(full, value);
            else if (key == "sigma_eps") cfg.data.sigma_eps = parse_real(full, value);
            else if (key == "filter_t") cfg.data.filter_t = parse_real(full, value);
            else if (key == "source") cfg.data.source = value;
            else if (key == "target_column") cfg.data.target_column = value;
            else if (key == "standardize") cfg.data.standardize = parse_bool(full, value);
            else throw ConfigError("config: unknown key " + full);
        } else if (section == "models") {
            if (key == "nngp") cfg.models.nngp = parse_bool(full, value);
            else if (key == "widths") cfg.models.widths = parse_int_list(full, value);
            else if (key == "activation") {
                try {
                    cfg.models.activation = activation_from_name(value);
                } catch (const std::exception&) {
                    throw ConfigError("config: " + full + " expects erf|relu, got '" +
                                      value + "'");
                }
            } else if (key == "sigma_w2") cfg.models.sigma_w2 = parse_real(full, value);
            else if (key == "sigma_b2") cfg.models.sigma_b2 = parse_real(full, value);
            else if (key == "noise_var") cfg.models.noise_var = parse_real(full, value);
            else if (key == "nngp_select") cfg.models.nngp_select = parse_bool(full, value);
            else if (key == "hyper_grid") cfg.models.hyper_grid = parse_real_list(full, value);
            else throw ConfigError("config: unknown key " + full);
        } else if (section == "sampler") {
            if (key == "chains") cfg.sampler.chains = static_cast<int>(parse_integer(full, value));
            else if (key == "warmup") cfg.sampler.warmup = static_cast<int>(parse_integer(full, value));
            else if (key == "kept") cfg.sampler.kept = static_cast<int>(parse_integer(full, value));
            else if (key == "thin") cfg.sampler.thin = static_cast<int>(parse_integer(full, value));
            else if (key == "target_accept") cfg.sampler.target_accept = parse_real(full, value);
            else if (key == "max_tree_depth") cfg.sampler.max_tree_depth = static_cast<int>(parse_integer(full, value));
            else if (key == "init_step_size") cfg.sampler.init_step_size = parse_real(full, value);
            else throw ConfigError("config: unknown key " + full);
        } else if (section == "filter") {
            if (key == "ts") cfg.filter.ts = parse_real_list(full, value);
            else if (key == "n_grid") cfg.filter.n_grid = static_cast<int>(parse_integer(full, value));
            else if (key == "grid_lo") cfg.filter.grid_lo = parse_real(full, value);
            else if (key == "grid_hi") cfg.filter.grid_hi = parse_real(full, value);
            else throw ConfigError("config: unknown key " + full);
        } else if (section == "spectrum") {
            if (key == "enabled") cfg.spectrum.enabled = parse_bool(full, value);
            else if (key == "m_draws") cfg.spectrum.m_draws = static_cast<int>(parse_integer(full, value));
            else if (key == "percentiles") cfg.spectrum.percentiles = parse_real_list(full, value);
            else if (key == "dataset") cfg.spectrum.dataset = value;
            else throw ConfigError("config: unknown key " + full);
        } else {  // ldl
            if (key == "enabled") cfg.ldl.enabled = parse_bool(full, value);
            else if (key == "s_count") cfg.ldl.s_count = static_cast<int>(parse_integer(full, value));
            else if (key == "widths") cfg.ldl.widths = parse_int_list(full, value);
            else if (key == "evaluator_kernel") cfg.ldl.evaluator.family = parse_family(full, value);
            else if (key == "evaluator_lengthscale") cfg.ldl.evaluator.lengthscale = parse_real(full, value);
            else if (key == "evaluator_sigma_w2") cfg.ldl.evaluator.sigma_w2 = parse_real(full, value);
            else if (key == "evaluator_sigma_b2") cfg.ldl.evaluator.sigma_b2 = parse_real(full, value);
            else throw ConfigError("config: unknown key " + full);
        }
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

void RunConfig::validate() const {
    if (s_count < 1) throw ConfigError("config: run.s_count must be >= 1");
    if (workers < 1) throw ConfigError("config: run.workers must be >= 1");
    if (data.source.empty()) {
        if (!data.has_kernel) {
            throw ConfigError("config: data.kernel is required for synthetic data");
        }
        try {
            data.kernel.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: invalid data kernel: ") + e.what());
        }
    } else if (data.target_column.empty()) {
        throw ConfigError("config: data.target_column is required with data.source");
    }
    if (data.sigma_eps < 0.0) throw ConfigError("config: data.sigma_eps must be >= 0");
    if (data.filter_t < 0.0 || data.filter_t > 1.0) {
        throw ConfigError("config: data.filter_t must lie in [0, 1]");
    }
    if (!models.nngp && models.widths.empty()) {
        throw ConfigError("config: models must enable nngp or list at least one width");
    }
    for (const int w : models.widths) {
        if (w < 1) throw ConfigError("config: models.widths entries must be >= 1");
    }
    if (!(models.noise_var > 0.0)) {
        throw ConfigError("config: models.noise_var must be positive");
    }
    if (filter.ts.empty()) throw ConfigError("config: filter.ts must not be empty");
    for (const double t : filter.ts) {
        if (t < 0.0 || t > 1.0) throw ConfigError("config: filter.ts entries must lie in [0, 1]");
    }
    if (filter.n_grid < 2) throw ConfigError("config: filter.n_grid must be >= 2");
    if (!(filter.grid_hi > filter.grid_lo)) {
        throw ConfigError("config: filter.grid_hi must exceed filter.grid_lo");
    }
    try {
        sampler.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: sampler: ") + e.what());
    }
    if (spectrum.enabled) {
        if (spectrum.m_draws < 2) throw ConfigError("config: spectrum.m_draws must be >= 2");
        if (spectrum.percentiles.empty()) {
            throw ConfigError("config: spectrum.percentiles must not be empty");
        }
    }
    if (ldl.enabled) {
        if (ldl.s_count < 2) throw ConfigError("config: ldl.s_count must be >= 2");
        try {
            ldl.evaluator.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: invalid ldl evaluator: ") + e.what());
        }
    }
}

void RunConfig::apply_full_scale() {
    s_count = 200;
    sampler.warmup = 10000;
    sampler.kept = 40000;
    sampler.thin = 5;
}

BnnSpec RunConfig::bnn_spec(int width, int input_dim) const {
    BnnSpec spec;
    spec.width = width;
    spec.activation = models.activation;
    spec.input_dim = input_dim;
    spec.sigma_w2 = models.sigma_w2;
    spec.sigma_b2 = models.sigma_b2;
    spec.noise_var = models.noise_var;
    return spec;
}

GpModel RunConfig::nngp_model() const {
    const BnnSpec proto = bnn_spec(1);
    return GpModel{proto.limiting_kernel(), models.noise_var};
}

GridSpec RunConfig::grid() const {
    return make_grid(filter.grid_lo, filter.grid_hi, filter.n_grid);
}

}  // namespace fbnn

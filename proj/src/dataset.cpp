#include "fbnn/dataset.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "fbnn/csv.hpp"
#include "fbnn/dct.hpp"

namespace fbnn {

namespace {

constexpr int kTrainPoints = 20;  // plus the fixed x = 0 point
constexpr int kTestPoints = 100;

std::string pad3(int value) {
    std::string s = std::to_string(value);
    while (s.size() < 3) s.insert(s.begin(), '0');
    return s;
}

}  // namespace

void Manifest::set(const std::string& key, std::string value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(key, std::move(value));
}

void Manifest::set_double(const std::string& key, double value) {
    set(key, csv::format_double(value));
}

void Manifest::set_int(const std::string& key, long long value) {
    set(key, std::to_string(value));
}

bool Manifest::has(const std::string& key) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const auto& e) { return e.first == key; });
}

const std::string& Manifest::get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    throw IoError("manifest: missing key '" + key + "'");
}

double Manifest::get_double(const std::string& key) const {
    return csv::parse_double(get(key));
}

long long Manifest::get_int(const std::string& key) const {
    return csv::parse_int(get(key));
}

Matrix sample_train_design(RandomStream& stream) {
    Matrix x(kTrainPoints + 1, 1);
    for (int i = 0; i < kTrainPoints; ++i) {
        const bool left = stream.uniform() < 0.5;
        x(i, 0) = left ? stream.uniform_range(-3.0, -1.0) : stream.uniform_range(1.0, 3.0);
    }
    x(kTrainPoints, 0) = 0.0;
    return x;
}

Matrix sample_test_design(RandomStream& stream) {
    Matrix x(kTestPoints, 1);
    for (int i = 0; i < kTestPoints; ++i) x(i, 0) = stream.uniform_range(-3.0, 3.0);
    return x;
}

KernelSpec kernel_from_manifest(const Manifest& manifest) {
    const KernelFamily family = kernel_family_from_name(manifest.get("kernel"));
    KernelSpec spec;
    spec.family = family;
    if (family == KernelFamily::Rbf) {
        spec.lengthscale = manifest.get_double("lengthscale");
    } else {
        spec.sigma_w2 = manifest.get_double("sigma_w2");
        spec.sigma_b2 = manifest.get_double("sigma_b2");
    }
    spec.validate();
    return spec;
}

void kernel_to_manifest(const KernelSpec& kernel, Manifest& manifest) {
    manifest.set("kernel", kernel_name(kernel.family));
    if (kernel.family == KernelFamily::Rbf) {
        manifest.set_double("lengthscale", kernel.lengthscale);
    } else {
        manifest.set_double("sigma_w2", kernel.sigma_w2);
        manifest.set_double("sigma_b2", kernel.sigma_b2);
    }
}

std::vector<Dataset> generate_synthetic_suite(const KernelSpec& kernel, int s_count,
                                              double sigma_eps, const SeedPath& seed) {
    kernel.validate();
    if (s_count < 1) throw std::invalid_argument("generate_synthetic_suite: S must be >= 1");
    if (sigma_eps < 0.0) {
        throw std::invalid_argument("generate_synthetic_suite: sigma_eps must be >= 0");
    }

    const GpModel generator{kernel, 0.0};
    std::vector<Dataset> suite;
    suite.reserve(static_cast<std::size_t>(s_count));
    for (int s = 0; s < s_count; ++s) {
        const SeedPath ds_seed = seed.child("dataset", static_cast<uint64_t>(s));
        RandomStream design(ds_seed.child("design"));

        Dataset ds;
        ds.id = "syn" + pad3(s);
        ds.x_train = sample_train_design(design);
        ds.x_test = sample_test_design(design);

        Matrix x_all(ds.x_train.rows() + ds.x_test.rows(), 1);
        x_all << ds.x_train, ds.x_test;
        const Vector f_all =
            gp_prior_sample(generator, x_all, false, ds_seed.child("function"));
        ds.f_train = f_all.head(ds.x_train.rows());
        ds.f_test = f_all.tail(ds.x_test.rows());

        RandomStream noise(ds_seed.child("noise"));
        ds.y_train = ds.f_train + sigma_eps * noise.normal_vector(ds.f_train.size());

        kernel_to_manifest(kernel, ds.manifest);
        ds.manifest.set_double("sigma_eps", sigma_eps);
        ds.manifest.set_int("seed", static_cast<long long>(ds_seed.derive()));
        ds.manifest.set_int("s_index", s);
        suite.push_back(std::move(ds));
    }
    return suite;
}

Vector lpf_grid_function(const GpModel& gp, const GridSpec& grid, double t,
                         const SeedPath& seed) {
    gp.validate();
    grid.validate();
    const GpModel noiseless{gp.kernel, 0.0};
    const Vector f_grid =
        gp_prior_sample(noiseless, grid.points_matrix(), false, seed.child("function"));
    return lowpass_apply(dct_plan(grid.n_grid), t, f_grid);
}

Dataset lpf_gp_dataset(const GpModel& gp, const GridSpec& grid, double t,
                       const Matrix& x_train, const Matrix& x_test, double sigma_eps,
                       const SeedPath& seed) {
    if (x_train.cols() != 1 || x_test.cols() != 1) {
        throw std::invalid_argument("lpf_gp_dataset: inputs must be one-dimensional");
    }
    const Matrix grid_x = grid.points_matrix();
    const Vector f_filtered = lpf_grid_function(gp, grid, t, seed);

    const auto train_idx = snap_to_grid(grid, x_train);
    const auto test_idx = snap_to_grid(grid, x_test);

    Dataset ds;
    ds.x_train.resize(x_train.rows(), 1);
    ds.f_train.resize(x_train.rows());
    for (Index i = 0; i < x_train.rows(); ++i) {
        ds.x_train(i, 0) = grid_x(train_idx[static_cast<std::size_t>(i)], 0);
        ds.f_train[i] = f_filtered[train_idx[static_cast<std::size_t>(i)]];
    }
    ds.x_test.resize(x_test.rows(), 1);
    ds.f_test.resize(x_test.rows());
    for (Index i = 0; i < x_test.rows(); ++i) {
        ds.x_test(i, 0) = grid_x(test_idx[static_cast<std::size_t>(i)], 0);
        ds.f_test[i] = f_filtered[test_idx[static_cast<std::size_t>(i)]];
    }

    RandomStream noise(seed.child("noise"));
    ds.y_train = ds.f_train + sigma_eps * noise.normal_vector(ds.f_train.size());

    kernel_to_manifest(gp.kernel, ds.manifest);
    ds.manifest.set_double("sigma_eps", sigma_eps);
    ds.manifest.set_double("t", t);
    ds.manifest.set_int("n_grid", grid.n_grid);
    ds.manifest.set_double("grid_lo", grid.lo);
    ds.manifest.set_double("grid_hi", grid.hi);
    ds.manifest.set_int("seed", static_cast<long long>(seed.derive()));
    return ds;
}

std::string dataset_to_string(const Dataset& ds) {
    std::ostringstream out;
    for (const auto& [k, v] : ds.manifest.entries()) out << k << " = " << v << '\n';

    const Index d = ds.x_train.cols();
    out << "role";
    for (Index j = 0; j < d; ++j) out << ",x" << j;
    out << ",y,f\n";

    auto emit = [&](const char* role, const Matrix& x, const Vector* y, const Vector* f) {
        for (Index i = 0; i < x.rows(); ++i) {
            out << role;
            for (Index j = 0; j < d; ++j) out << ',' << csv::format_double(x(i, j));
            out << ',';
            if (y != nullptr && y->size() == x.rows()) out << csv::format_double((*y)[i]);
            out << ',';
            if (f != nullptr && f->size() == x.rows()) out << csv::format_double((*f)[i]);
            out << '\n';
        }
    };
    const bool real_data = ds.f_train.size() == 0;
    emit("train", ds.x_train, &ds.y_train, &ds.f_train);
    if (real_data) {
        emit("test", ds.x_test, &ds.f_test, nullptr);  // observed targets, no noiseless f
    } else {
        emit("test", ds.x_test, nullptr, &ds.f_test);
    }
    emit("valid", ds.x_valid, &ds.y_valid, nullptr);
    return out.str();
}

Dataset dataset_from_string(const std::string& text, std::string id) {
    std::istringstream in(text);
    std::string line;

    Dataset ds;
    ds.id = std::move(id);
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        if (line.rfind("role", 0) == 0) {
            header = csv::split(line);
            break;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw IoError("dataset: malformed manifest line: " + line);
        ds.manifest.set(std::string(csv::trim(line.substr(0, eq))),
                        std::string(csv::trim(line.substr(eq + 1))));
    }
    if (header.size() < 4 || header[0] != "role") {
        throw IoError("dataset: missing role header row");
    }
    const Index d = static_cast<Index>(header.size()) - 3;

    struct Rows {
        std::vector<std::vector<double>> x;
        std::vector<std::string> y, f;
    };
    Rows train, test, valid;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split(line);
        if (static_cast<Index>(fields.size()) != d + 3) {
            throw IoError("dataset: wrong field count in row: " + line);
        }
        Rows* bucket = nullptr;
        if (fields[0] == "train") bucket = &train;
        else if (fields[0] == "test") bucket = &test;
        else if (fields[0] == "valid") bucket = &valid;
        else throw IoError("dataset: unknown role '" + fields[0] + "'");
        std::vector<double> xrow(static_cast<std::size_t>(d));
        for (Index j = 0; j < d; ++j) {
            xrow[static_cast<std::size_t>(j)] = csv::parse_double(fields[static_cast<std::size_t>(j) + 1]);
        }
        bucket->x.push_back(std::move(xrow));
        bucket->y.push_back(std::string(csv::trim(fields[static_cast<std::size_t>(d) + 1])));
        bucket->f.push_back(std::string(csv::trim(fields[static_cast<std::size_t>(d) + 2])));
    }
    if (train.x.empty() || test.x.empty()) {
        throw IoError("dataset: needs at least one train and one test row");
    }

    auto to_matrix = [d](const Rows& rows) {
        Matrix x(static_cast<Index>(rows.x.size()), d);
        for (std::size_t i = 0; i < rows.x.size(); ++i) {
            for (Index j = 0; j < d; ++j) x(static_cast<Index>(i), j) = rows.x[i][static_cast<std::size_t>(j)];
        }
        return x;
    };
    auto to_vector = [](const std::vector<std::string>& col) -> Vector {
        if (std::any_of(col.begin(), col.end(), [](const auto& s) { return s.empty(); })) {
            return Vector();
        }
        Vector v(static_cast<Index>(col.size()));
        for (std::size_t i = 0; i < col.size(); ++i) v[static_cast<Index>(i)] = csv::parse_double(col[i]);
        return v;
    };

    ds.x_train = to_matrix(train);
    ds.y_train = to_vector(train.y);
    ds.f_train = to_vector(train.f);
    if (ds.y_train.size() == 0) throw IoError("dataset: train rows need y values");

    ds.x_test = to_matrix(test);
    const Vector test_f = to_vector(test.f);
    ds.f_test = test_f.size() > 0 ? test_f : to_vector(test.y);
    if (ds.f_test.size() == 0) throw IoError("dataset: test rows need f or y values");

    if (!valid.x.empty()) {
        ds.x_valid = to_matrix(valid);
        ds.y_valid = to_vector(valid.y);
        if (ds.y_valid.size() == 0) throw IoError("dataset: valid rows need y values");
    }
    return ds;
}

void save_dataset(const std::string& path, const Dataset& ds) {
    csv::write_file(path, dataset_to_string(ds));
}

Dataset load_dataset(const std::string& path) {
    const auto lines = csv::read_lines(path);
    std::string text;
    for (const auto& l : lines) {
        text += l;
        text += '\n';
    }
    std::string id = path;
    const std::size_t slash = id.find_last_of('/');
    if (slash != std::string::npos) id = id.substr(slash + 1);
    const std::size_t dot = id.find_last_of('.');
    if (dot != std::string::npos) id = id.substr(0, dot);
    return dataset_from_string(text, id);
}

}  // namespace fbnn

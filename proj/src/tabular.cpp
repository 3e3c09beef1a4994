#include "fbnn/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fbnn/csv.hpp"

namespace fbnn {

void SplitRatios::validate() const {
    if (!(train > 0.0) || !(test > 0.0) || train + test >= 1.0) {
        throw std::invalid_argument("SplitRatios: need train, test > 0 and train + test < 1");
    }
}

Dataset load_tabular(const std::string& path, const std::string& target_column,
                     bool standardize, const SeedPath& seed, const SplitRatios& ratios) {
    ratios.validate();
    const auto lines = csv::read_lines(path);
    if (lines.size() < 2) throw IoError("tabular: file has no data rows: " + path);

    const auto header = csv::split(lines[0]);
    Index target = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (std::string(csv::trim(header[j])) == target_column) {
            target = static_cast<Index>(j);
        }
    }
    if (target < 0) {
        throw IoError("tabular: missing target column '" + target_column + "' in " + path);
    }
    const Index n_col = static_cast<Index>(header.size());
    if (n_col < 2) throw IoError("tabular: need at least one feature column");

    std::vector<std::vector<double>> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const auto fields = csv::split(lines[i]);
        if (static_cast<Index>(fields.size()) != n_col) {
            throw IoError("tabular: row " + std::to_string(i + 1) + " has wrong field count");
        }
        std::vector<double> row(static_cast<std::size_t>(n_col));
        for (Index j = 0; j < n_col; ++j) {
            row[static_cast<std::size_t>(j)] = csv::parse_double(fields[static_cast<std::size_t>(j)]);
        }
        rows.push_back(std::move(row));
    }
    Matrix table(static_cast<Index>(rows.size()), n_col);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (Index j = 0; j < n_col; ++j) table(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    }
    const Index n = table.rows();
    if (n < 3) throw IoError("tabular: need at least three rows to split");

    // Deterministic Fisher-Yates shuffle of row order.
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    RandomStream stream(seed.child("shuffle"));
    for (Index i = n - 1; i > 0; --i) {
        const auto j = std::min<Index>(
            i, static_cast<Index>(stream.uniform() * static_cast<double>(i + 1)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    const Index n_train = static_cast<Index>(std::floor(ratios.train * static_cast<double>(n)));
    const Index n_test = static_cast<Index>(std::floor(ratios.test * static_cast<double>(n)));
    const Index n_valid = n - n_train - n_test;
    if (n_train < 1 || n_test < 1 || n_valid < 1) {
        throw IoError("tabular: split produced an empty subset");
    }

    Matrix shuffled(n, n_col);
    for (Index i = 0; i < n; ++i) shuffled.row(i) = table.row(order[static_cast<std::size_t>(i)]);

    if (standardize) {
        for (Index j = 0; j < n_col; ++j) {
            const auto train_col = shuffled.col(j).head(n_train);
            const double mean = train_col.mean();
            double sd = 0.0;
            if (n_train > 1) {
                sd = std::sqrt((train_col.array() - mean).square().sum() /
                               static_cast<double>(n_train - 1));
            }
            shuffled.col(j).array() -= mean;
            if (sd > 0.0) shuffled.col(j) /= sd;
        }
    }

    const Index d = n_col - 1;
    auto take = [&](Index start, Index count, Matrix& x, Vector& y) {
        x.resize(count, d);
        y.resize(count);
        for (Index i = 0; i < count; ++i) {
            Index col = 0;
            for (Index j = 0; j < n_col; ++j) {
                if (j == target) continue;
                x(i, col++) = shuffled(start + i, j);
            }
            y[i] = shuffled(start + i, target);
        }
    };

    Dataset ds;
    ds.id = [&] {
        std::string stem = path;
        const auto slash = stem.find_last_of('/');
        if (slash != std::string::npos) stem = stem.substr(slash + 1);
        const auto dot = stem.find_last_of('.');
        if (dot != std::string::npos) stem = stem.substr(0, dot);
        return stem;
    }();
    take(0, n_train, ds.x_train, ds.y_train);
    take(n_train, n_test, ds.x_test, ds.f_test);  // observed targets stand in for f
    take(n_train + n_test, n_valid, ds.x_valid, ds.y_valid);

    ds.manifest.set("source", path);
    ds.manifest.set("target_column", target_column);
    ds.manifest.set("standardize", standardize ? "true" : "false");
    ds.manifest.set_int("seed", static_cast<long long>(seed.derive()));
    ds.manifest.set_int("n_train", n_train);
    ds.manifest.set_int("n_test", n_test);
    ds.manifest.set_int("n_valid", n_valid);
    return ds;
}

}  // namespace fbnn

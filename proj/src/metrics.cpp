#include "fbnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "fbnn/csv.hpp"

namespace fbnn {

namespace {

// Mean over test points of -log((1/M) sum_m N(target_j | preds(m,j), noise)).
double mixture_nll(const Matrix& preds, const Vector& targets, double noise_var) {
    const Index m_count = preds.rows();
    const double log_norm =
        -0.5 * std::log(2.0 * std::numbers::pi * noise_var) -
        std::log(static_cast<double>(m_count));
    double total = 0.0;
    for (Index j = 0; j < targets.size(); ++j) {
        const auto sq = (preds.col(j).array() - targets[j]).square();
        const double top = sq.minCoeff();  // largest exponent term
        const double lse =
            -top / (2.0 * noise_var) +
            std::log((-(sq - top) / (2.0 * noise_var)).exp().sum());
        total += -(log_norm + lse);
    }
    return total / static_cast<double>(targets.size());
}

double gaussian_nll(const Vector& mean, const Vector& var, const Vector& targets) {
    double total = 0.0;
    for (Index j = 0; j < targets.size(); ++j) {
        const double r = targets[j] - mean[j];
        total += 0.5 * std::log(2.0 * std::numbers::pi * var[j]) + r * r / (2.0 * var[j]);
    }
    return total / static_cast<double>(targets.size());
}

double mean_se(const std::vector<double>& diffs, double& se_out) {
    const auto n = static_cast<double>(diffs.size());
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= n;
    double var = 0.0;
    if (diffs.size() > 1) {
        for (double d : diffs) var += (d - mean) * (d - mean);
        var /= (n - 1.0);
    }
    se_out = std::sqrt(var / n);
    return mean;
}

}  // namespace

MetricRow evaluate_bnn(const BnnSpec& spec, const Matrix& draws, const Dataset& ds,
                       const LowpassContext* filter, bool moment_matched) {
    if (draws.rows() == 0) throw std::invalid_argument("evaluate_bnn: no draws");
    if (draws.cols() != spec.param_count()) {
        throw std::invalid_argument("evaluate_bnn: draw length does not match the spec");
    }

    Matrix preds;  // M x n_test
    if (filter == nullptr) {
        preds = predictive_function_draws(spec, draws, ds.x_test);
    } else {
        if (static_cast<Index>(filter->selection.size()) != ds.x_test.rows()) {
            throw std::invalid_argument("evaluate_bnn: filter not built on x_test");
        }
        preds.resize(draws.rows(), ds.x_test.rows());
        for (Index m = 0; m < draws.rows(); ++m) {
            preds.row(m) = lpf_forward(spec, draws.row(m), *filter).at_data.transpose();
        }
    }

    MetricRow row;
    row.dataset_id = ds.id;
    row.model = "bnn";
    row.width = spec.width;
    row.t = filter != nullptr ? filter->t : 0.0;

    const Vector mean = preds.colwise().mean();
    row.mse = (mean - ds.f_test).squaredNorm() / static_cast<double>(ds.f_test.size());

    if (moment_matched) {
        Vector var(preds.cols());
        for (Index j = 0; j < preds.cols(); ++j) {
            const auto centered = preds.col(j).array() - mean[j];
            const double m_count = static_cast<double>(preds.rows());
            var[j] = centered.square().sum() / std::max(m_count - 1.0, 1.0) + spec.noise_var;
        }
        row.nll = gaussian_nll(mean, var, ds.f_test);
    } else {
        row.nll = mixture_nll(preds, ds.f_test, spec.noise_var);
    }
    return row;
}

MetricRow evaluate_nngp(const GpModel& model, const Dataset& ds) {
    const GpPosterior posterior = gp_fit(model, ds.x_train, ds.y_train);
    const GpPredictive pred = posterior.predict(ds.x_test);

    Vector var(ds.x_test.rows());
    for (Index j = 0; j < var.size(); ++j) {
        var[j] = std::max(pred.cov(j, j), 0.0) + model.noise_var;
    }

    MetricRow row;
    row.dataset_id = ds.id;
    row.model = "nngp";
    row.width = 0;
    row.t = 0.0;
    row.mse = (pred.mean - ds.f_test).squaredNorm() / static_cast<double>(ds.f_test.size());
    row.nll = gaussian_nll(pred.mean, var, ds.f_test);
    return row;
}

std::vector<DeltaSummary> delta_metrics(const std::vector<MetricRow>& bnn_rows,
                                        const std::vector<MetricRow>& nngp_rows) {
    std::map<std::string, const MetricRow*> baseline;
    for (const auto& row : nngp_rows) {
        if (!baseline.emplace(row.dataset_id, &row).second) {
            throw PairingError("delta_metrics: duplicate nngp row for dataset " +
                               row.dataset_id);
        }
    }
    if (bnn_rows.empty()) throw PairingError("delta_metrics: no bnn rows");
    if (baseline.empty()) throw PairingError("delta_metrics: no nngp rows");

    std::map<std::pair<int, double>, std::vector<const MetricRow*>> groups;
    for (const auto& row : bnn_rows) groups[{row.width, row.t}].push_back(&row);

    std::vector<DeltaSummary> out;
    for (auto& [key, rows] : groups) {
        std::sort(rows.begin(), rows.end(), [](const MetricRow* a, const MetricRow* b) {
            return a->dataset_id < b->dataset_id;
        });
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i]->dataset_id == rows[i - 1]->dataset_id) {
                throw PairingError("delta_metrics: duplicate bnn row for dataset " +
                                   rows[i]->dataset_id);
            }
        }
        std::vector<double> nll_diffs, mse_diffs;
        std::string missing;
        for (const MetricRow* row : rows) {
            const auto it = baseline.find(row->dataset_id);
            if (it == baseline.end()) {
                missing += missing.empty() ? row->dataset_id : ", " + row->dataset_id;
                continue;
            }
            nll_diffs.push_back(row->nll - it->second->nll);
            mse_diffs.push_back(row->mse - it->second->mse);
        }
        if (!missing.empty()) {
            throw PairingError("delta_metrics: no nngp baseline for datasets: " + missing);
        }
        if (rows.size() != baseline.size()) {
            throw PairingError("delta_metrics: bnn group (width " +
                               std::to_string(key.first) +
                               ") does not cover every nngp dataset");
        }
        DeltaSummary d;
        d.width = key.first;
        d.t = key.second;
        d.s_count = static_cast<int>(nll_diffs.size());
        d.delta_nll = mean_se(nll_diffs, d.delta_nll_se);
        d.delta_mse = mean_se(mse_diffs, d.delta_mse_se);
        out.push_back(d);
    }
    return out;
}

std::string metrics_to_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream out;
    out << "dataset_id,model,width,t,nll,mse\n";
    for (const auto& row : rows) {
        out << row.dataset_id << ',' << row.model << ',' << row.width << ','
            << csv::format_double(row.t) << ',' << csv::format_double(row.nll) << ','
            << csv::format_double(row.mse) << '\n';
    }
    return out.str();
}

std::vector<MetricRow> metrics_from_csv(const std::vector<std::string>& lines) {
    if (lines.empty() || csv::split(lines[0]).size() != 6) {
        throw IoError("metrics csv: bad or missing header");
    }
    std::vector<MetricRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != 6) {
            throw IoError("metrics csv: wrong field count on row " + std::to_string(i + 1));
        }
        MetricRow row;
        row.dataset_id = f[0];
        row.model = f[1];
        row.width = static_cast<int>(csv::parse_int(f[2]));
        row.t = csv::parse_double(f[3]);
        row.nll = csv::parse_double(f[4]);
        row.mse = csv::parse_double(f[5]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string deltas_to_csv(const std::vector<DeltaSummary>& deltas) {
    std::ostringstream out;
    out << "width,t,delta_nll,delta_nll_se,delta_mse,delta_mse_se,S\n";
    for (const auto& d : deltas) {
        out << d.width << ',' << csv::format_double(d.t) << ','
            << csv::format_double(d.delta_nll) << ',' << csv::format_double(d.delta_nll_se)
            << ',' << csv::format_double(d.delta_mse) << ','
            << csv::format_double(d.delta_mse_se) << ',' << d.s_count << '\n';
    }
    return out.str();
}

}  // namespace fbnn

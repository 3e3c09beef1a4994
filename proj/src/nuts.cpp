#include "fbnn/nuts.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fbnn/csv.hpp"

namespace fbnn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

double log_joint(const PhasePoint& z) { return z.logp - 0.5 * z.r.squaredNorm(); }

bool uturn(const PhasePoint& minus, const PhasePoint& plus) {
    const Vector span = plus.theta - minus.theta;
    return span.dot(minus.r) < 0.0 || span.dot(plus.r) < 0.0;
}

// Biased autocovariance (divide by n), computed lag by lag on demand.
double autocov(const Vector& x, double mean, Index lag) {
    double s = 0.0;
    for (Index i = 0; i + lag < x.size(); ++i) {
        s += (x[i] - mean) * (x[i + lag] - mean);
    }
    return s / static_cast<double>(x.size());
}

}  // namespace

void SamplerConfig::validate() const {
    if (chains < 1 || warmup < 1 || kept < 1 || thin < 1) {
        throw std::invalid_argument("SamplerConfig: all counts must be >= 1");
    }
    if (!(target_accept > 0.0 && target_accept < 1.0)) {
        throw std::invalid_argument("SamplerConfig: target_accept must lie in (0, 1)");
    }
    if (max_tree_depth < 1) {
        throw std::invalid_argument("SamplerConfig: max_tree_depth must be >= 1");
    }
    if (!(init_step_size > 0.0)) {
        throw std::invalid_argument("SamplerConfig: init_step_size must be positive");
    }
    if (kept % thin != 0) {
        throw std::invalid_argument("SamplerConfig: kept must be divisible by thin");
    }
}

SamplerConfig SamplerConfig::full_scale() {
    SamplerConfig cfg;
    cfg.warmup = 10000;
    cfg.kept = 40000;
    cfg.thin = 5;
    return cfg;
}

double ChainDiagnostics::max_rhat() const {
    double worst = 1.0;
    for (double r : split_rhat) worst = std::max(worst, r);
    return worst;
}

double ChainDiagnostics::min_ess() const {
    double least = std::numeric_limits<double>::infinity();
    for (double e : ess) least = std::min(least, e);
    return std::isfinite(least) ? least : 0.0;
}

InitFn explicit_init(Vector theta0) {
    return [theta0 = std::move(theta0)](RandomStream&) { return theta0; };
}

InitFn gaussian_init(Index dim, double scale) {
    return [dim, scale](RandomStream& stream) -> Vector {
        return scale * stream.normal_vector(dim);
    };
}

DualAveraging::DualAveraging(double init_step_size, double target_accept)
    : mu_(std::log(10.0 * init_step_size)),
      target_(target_accept),
      log_step_(std::log(init_step_size)),
      log_step_avg_(std::log(init_step_size)) {}

void DualAveraging::observe(double accept_stat) {
    ++counter_;
    const double m = static_cast<double>(counter_);
    const double eta = 1.0 / (m + 10.0);
    h_bar_ = (1.0 - eta) * h_bar_ + eta * (target_ - accept_stat);
    log_step_ = mu_ - std::sqrt(m) / 0.05 * h_bar_;
    const double w = std::pow(m, -0.75);
    log_step_avg_ = w * log_step_ + (1.0 - w) * log_step_avg_;
}

double DualAveraging::current() const { return std::exp(log_step_); }

double DualAveraging::adapted() const { return std::exp(log_step_avg_); }

PhasePoint leapfrog(const LogDensityGrad& target, const PhasePoint& z, double step) {
    PhasePoint out;
    out.r = z.r + (0.5 * step) * z.grad;
    out.theta = z.theta + step * out.r;
    out.grad.resize(z.theta.size());
    out.logp = target(out.theta, out.grad);
    out.r += (0.5 * step) * out.grad;
    return out;
}

namespace {

struct Proposal {
    Vector theta;
    Vector grad;
    double logp = 0.0;
};

struct Subtree {
    PhasePoint minus;
    PhasePoint plus;
    Proposal prop;
    double log_weight = kNegInf;  // log sum of relative joint weights in the subtree
    double sum_alpha = 0.0;
    long n_alpha = 0;
    bool divergent = false;
    bool turning = false;
};

class ChainRunner {
public:
    ChainRunner(const LogDensityGrad& target, const SamplerConfig& cfg,
                const InitFn& init, const SeedPath& seed, int chain_id)
        : target_(target), cfg_(cfg), stream_(seed.child("chain", static_cast<uint64_t>(chain_id))) {
        current_.theta = init(stream_);
        dim_ = current_.theta.size();
        current_.grad.resize(dim_);
        current_.logp = target_(current_.theta, current_.grad);
        if (!std::isfinite(current_.logp) || !current_.grad.allFinite()) {
            throw std::runtime_error("nuts_sample: target is not finite at the chain start");
        }
    }

    void run(Matrix& draws_out, Index first_row, ChainDiagnostics& diag) {
        DualAveraging da(cfg_.init_step_size, cfg_.target_accept);
        int warmup_divergences = 0;
        for (int it = 0; it < cfg_.warmup; ++it) {
            const double accept = iterate(da.current());
            if (diverged_) ++warmup_divergences;
            da.observe(accept);
        }
        if (warmup_divergences == cfg_.warmup) {
            throw std::runtime_error("nuts_sample: every warmup transition diverged");
        }

        const double step = da.adapted();
        diag.step_size = step;
        double accept_sum = 0.0;
        Index row = first_row;
        for (int it = 1; it <= cfg_.kept; ++it) {
            accept_sum += iterate(step);
            if (diverged_) ++diag.divergences;
            if (it % cfg_.thin == 0) {
                draws_out.row(row++) = current_.theta.transpose();
            }
        }
        diag.mean_accept = accept_sum / static_cast<double>(cfg_.kept);

        const Index kept_rows = row - first_row;
        diag.split_rhat.resize(static_cast<std::size_t>(dim_));
        diag.ess.resize(static_cast<std::size_t>(dim_));
        for (Index p = 0; p < dim_; ++p) {
            const Vector series = draws_out.block(first_row, p, kept_rows, 1);
            diag.split_rhat[static_cast<std::size_t>(p)] = split_rhat_halves(series);
            diag.ess[static_cast<std::size_t>(p)] = effective_sample_size(series);
        }
    }

private:
    // One NUTS transition; returns the mean acceptance statistic and updates
    // current_. Sets diverged_ when the trajectory hit the energy threshold.
    double iterate(double step) {
        diverged_ = false;
        current_.r = stream_.normal_vector(dim_);
        log_joint0_ = log_joint(current_);

        PhasePoint minus = current_;
        PhasePoint plus = current_;
        Proposal prop{current_.theta, current_.grad, current_.logp};
        double log_w_tree = 0.0;  // weight of the initial point relative to itself
        double sum_alpha = 0.0;
        long n_alpha = 0;

        for (int depth = 0; depth < cfg_.max_tree_depth; ++depth) {
            const int dir = stream_.uniform() < 0.5 ? -1 : 1;
            const Subtree sub = build_tree(depth, dir, dir > 0 ? plus : minus, step);
            sum_alpha += sub.sum_alpha;
            n_alpha += sub.n_alpha;
            if (sub.divergent) {
                diverged_ = true;
                break;
            }
            if (sub.turning) break;
            // Biased progressive sampling across the doubling.
            if (std::log(stream_.uniform()) < sub.log_weight - log_w_tree) {
                prop = sub.prop;
            }
            log_w_tree = log_sum_exp(log_w_tree, sub.log_weight);
            if (dir > 0) plus = sub.plus; else minus = sub.minus;
            if (uturn(minus, plus)) break;
        }

        current_.theta = std::move(prop.theta);
        current_.grad = std::move(prop.grad);
        current_.logp = prop.logp;
        return n_alpha > 0 ? sum_alpha / static_cast<double>(n_alpha) : 0.0;
    }

    Subtree build_tree(int depth, int dir, const PhasePoint& from, double step) {
        if (depth == 0) {
            Subtree leaf;
            PhasePoint z = leapfrog(target_, from, dir * step);
            const double lj = log_joint(z);
            const double delta = lj - log_joint0_;  // -(energy error)
            leaf.divergent = !std::isfinite(lj) || -delta > cfg_.divergence_threshold;
            leaf.log_weight = std::isfinite(lj) ? delta : kNegInf;
            leaf.sum_alpha = std::isfinite(lj) ? std::min(1.0, std::exp(delta)) : 0.0;
            leaf.n_alpha = 1;
            leaf.prop = Proposal{z.theta, z.grad, z.logp};
            leaf.minus = std::move(z);
            leaf.plus = leaf.minus;
            return leaf;
        }

        Subtree first = build_tree(depth - 1, dir, from, step);
        if (first.divergent || first.turning) return first;
        Subtree second =
            build_tree(depth - 1, dir, dir > 0 ? first.plus : first.minus, step);

        Subtree merged;
        merged.minus = dir > 0 ? std::move(first.minus) : std::move(second.minus);
        merged.plus = dir > 0 ? std::move(second.plus) : std::move(first.plus);
        merged.sum_alpha = first.sum_alpha + second.sum_alpha;
        merged.n_alpha = first.n_alpha + second.n_alpha;
        merged.divergent = second.divergent;
        merged.log_weight = log_sum_exp(first.log_weight, second.log_weight);
        if (merged.divergent) return merged;

        // Plain multinomial choice between the two halves.
        const double p_second = std::exp(second.log_weight - merged.log_weight);
        merged.prop = stream_.uniform() < p_second ? std::move(second.prop)
                                                   : std::move(first.prop);
        merged.turning = second.turning || uturn(merged.minus, merged.plus);
        return merged;
    }

    const LogDensityGrad& target_;
    const SamplerConfig& cfg_;
    RandomStream stream_;
    PhasePoint current_;
    Index dim_ = 0;
    double log_joint0_ = 0.0;
    bool diverged_ = false;
};

}  // namespace

PosteriorDraws nuts_sample(const LogDensityGrad& target, Index dim,
                           const SamplerConfig& config, const InitFn& init,
                           const SeedPath& seed, int workers) {
    config.validate();
    if (dim < 1) throw std::invalid_argument("nuts_sample: dimension must be >= 1");

    const int dpc = config.draws_per_chain();
    PosteriorDraws out;
    out.draws.resize(static_cast<Index>(config.chains) * dpc, dim);
    out.chain_of_draw.resize(static_cast<std::size_t>(config.chains) * dpc);
    out.diagnostics.assign(static_cast<std::size_t>(config.chains), ChainDiagnostics{});
    for (int c = 0; c < config.chains; ++c) {
        for (int k = 0; k < dpc; ++k) {
            out.chain_of_draw[static_cast<std::size_t>(c * dpc + k)] = c;
        }
    }

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.chains));
    auto run_chain = [&](int c) {
        try {
            ChainRunner runner(target, config, init, seed, c);
            runner.run(out.draws, static_cast<Index>(c) * dpc,
                       out.diagnostics[static_cast<std::size_t>(c)]);
        } catch (...) {
            errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
    };

    const int pool = std::clamp(workers, 1, config.chains);
    if (pool == 1) {
        for (int c = 0; c < config.chains; ++c) run_chain(c);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(pool));
        for (int w = 0; w < pool; ++w) {
            threads.emplace_back([&] {
                while (true) {
                    const int c = next.fetch_add(1);
                    if (c >= config.chains) return;
                    run_chain(c);
                }
            });
        }
        for (auto& th : threads) th.join();
    }
    for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
    return out;
}

double split_rhat_halves(const Vector& series) {
    const Index half = series.size() / 2;
    if (half < 2) return 1.0;
    const Vector a = series.head(half);
    const Vector b = series.tail(half);
    const double ma = a.mean();
    const double mb = b.mean();
    const double va = (a.array() - ma).square().sum() / static_cast<double>(half - 1);
    const double vb = (b.array() - mb).square().sum() / static_cast<double>(half - 1);
    const double w = 0.5 * (va + vb);
    if (!(w > 0.0)) return 1.0;
    const double grand = 0.5 * (ma + mb);
    const double between =
        static_cast<double>(half) * ((ma - grand) * (ma - grand) + (mb - grand) * (mb - grand));
    const double var_plus =
        (static_cast<double>(half) - 1.0) / static_cast<double>(half) * w +
        between / static_cast<double>(half);
    return std::sqrt(var_plus / w);
}

double effective_sample_size(const Vector& series) {
    const Index n = series.size();
    if (n < 4) return static_cast<double>(n);
    const double mean = series.mean();
    const double g0 = autocov(series, mean, 0);
    if (!(g0 > 0.0)) return static_cast<double>(n);

    // Geyer initial monotone positive sequence over lag pairs.
    double pair_sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (Index m = 0; 2 * m + 1 < n; ++m) {
        double pair = autocov(series, mean, 2 * m) + autocov(series, mean, 2 * m + 1);
        if (pair <= 0.0) break;
        pair = std::min(pair, prev);
        prev = pair;
        pair_sum += pair;
    }
    const double tau = std::max(-1.0 + 2.0 * pair_sum / g0, 1e-8);
    return static_cast<double>(n) / tau;
}

std::string draws_to_csv(const PosteriorDraws& draws) {
    std::ostringstream out;
    out << "chain,draw";
    for (Index p = 0; p < draws.draws.cols(); ++p) out << ",theta_" << p;
    out << '\n';
    int prev_chain = -1;
    int within = 0;
    for (Index i = 0; i < draws.draws.rows(); ++i) {
        const int chain = draws.chain_of_draw[static_cast<std::size_t>(i)];
        within = chain == prev_chain ? within + 1 : 0;
        prev_chain = chain;
        out << chain << ',' << within;
        for (Index p = 0; p < draws.draws.cols(); ++p) {
            out << ',' << csv::format_double(draws.draws(i, p));
        }
        out << '\n';
    }
    return out.str();
}

PosteriorDraws draws_from_csv(const std::vector<std::string>& lines) {
    if (lines.empty()) throw IoError("draws csv: empty file");
    const auto header = csv::split(lines[0]);
    if (header.size() < 3 || header[0] != "chain" || header[1] != "draw") {
        throw IoError("draws csv: unexpected header");
    }
    const Index dim = static_cast<Index>(header.size()) - 2;
    std::vector<std::string> rows(lines.begin() + 1, lines.end());
    while (!rows.empty() && csv::trim(rows.back()).empty()) rows.pop_back();

    PosteriorDraws out;
    out.draws.resize(static_cast<Index>(rows.size()), dim);
    out.chain_of_draw.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto fields = csv::split(rows[i]);
        if (static_cast<Index>(fields.size()) != dim + 2) {
            throw IoError("draws csv: wrong field count on row " + std::to_string(i + 2));
        }
        out.chain_of_draw[i] = static_cast<int>(csv::parse_int(fields[0]));
        for (Index p = 0; p < dim; ++p) {
            out.draws(static_cast<Index>(i), p) =
                csv::parse_double(fields[static_cast<std::size_t>(p) + 2]);
        }
    }
    return out;
}

std::string diagnostics_to_csv(const std::vector<ChainDiagnostics>& diags) {
    std::ostringstream out;
    out << "chain,mean_accept,divergences,step_size,min_ess,max_rhat\n";
    for (std::size_t c = 0; c < diags.size(); ++c) {
        const auto& d = diags[c];
        out << c << ',' << csv::format_double(d.mean_accept) << ',' << d.divergences
            << ',' << csv::format_double(d.step_size) << ','
            << csv::format_double(d.min_ess()) << ','
            << csv::format_double(d.max_rhat()) << '\n';
    }
    return out.str();
}

}  // namespace fbnn

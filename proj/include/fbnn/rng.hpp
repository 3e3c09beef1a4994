#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fbnn/linalg.hpp"

namespace fbnn {

/// Hierarchical seed: a master seed plus an ordered list of (name, index)
/// labels naming a unit of work (dataset, chain, ...). The derived seed is a
/// pure hash of the path, so results never depend on thread scheduling.
class SeedPath {
public:
    explicit SeedPath(std::uint64_t master_seed) : master_(master_seed) {}

    SeedPath child(std::string_view name, std::uint64_t index = 0) const;

    std::uint64_t derive() const;

    std::uint64_t master() const { return master_; }
    const std::vector<std::pair<std::string, std::uint64_t>>& labels() const {
        return labels_;
    }

private:
    std::uint64_t master_;
    std::vector<std::pair<std::string, std::uint64_t>> labels_;
};

/// Deterministic stream of uniform and standard-normal doubles. mt19937_64 is
/// fully specified by the standard and the normal transform is done here, so
/// sequences are reproducible across platforms and library versions.
class RandomStream {
public:
    explicit RandomStream(const SeedPath& seed) : engine_(seed.derive()) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal();

    Vector normal_vector(Index n);

    /// Uniform on [lo, hi).
    double uniform_range(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Draw from N(mean, cov). A zero covariance matrix returns the mean exactly;
/// otherwise cov is factorized with the standard jitter escalation.
Vector mvn_sample(const Vector& mean, const Matrix& cov, RandomStream& stream);
Vector mvn_sample(const Vector& mean, const Matrix& cov, const SeedPath& seed);

}  // namespace fbnn

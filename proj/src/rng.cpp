#include "fbnn/rng.hpp"

#include <cmath>
#include <numbers>

namespace fbnn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_string(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) {
        h = splitmix64(h ^ static_cast<std::uint64_t>(c));
    }
    return h;
}

}  // namespace

SeedPath SeedPath::child(std::string_view name, std::uint64_t index) const {
    SeedPath out(*this);
    out.labels_.emplace_back(std::string(name), index);
    return out;
}

std::uint64_t SeedPath::derive() const {
    std::uint64_t h = splitmix64(master_);
    for (const auto& [name, index] : labels_) {
        h = mix_string(h, name);
        h = splitmix64(h ^ index);
    }
    return h;
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Vector RandomStream::normal_vector(Index n) {
    Vector out(n);
    for (Index i = 0; i < n; ++i) out[i] = normal();
    return out;
}

Vector mvn_sample(const Vector& mean, const Matrix& cov, RandomStream& stream) {
    if (mean.size() != cov.rows() || cov.rows() != cov.cols()) {
        throw std::invalid_argument("mvn_sample: mean and covariance dimensions disagree");
    }
    if (cov.size() == 0 || cov.cwiseAbs().maxCoeff() == 0.0) {
        return mean;
    }
    const auto chol = linalg::cholesky(cov);
    return mean + chol.factor * stream.normal_vector(mean.size());
}

Vector mvn_sample(const Vector& mean, const Matrix& cov, const SeedPath& seed) {
    RandomStream stream(seed);
    return mvn_sample(mean, cov, stream);
}

}  // namespace fbnn

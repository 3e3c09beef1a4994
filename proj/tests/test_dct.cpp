#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbnn/dct.hpp"
#include "fbnn/rng.hpp"

using fbnn::DctPlan;
using fbnn::Matrix;
using fbnn::Vector;
using fbnn::RandomStream;
using fbnn::SeedPath;

namespace {

// Direct summation from the analytic definition; no matrix involved.
Vector naive_dct(const Vector& f) {
    const int n = static_cast<int>(f.size());
    Vector a(n);
    for (int i = 0; i < n; ++i) {
        double scale = std::sqrt(2.0) / std::sqrt((i == 0 ? 2.0 : 1.0) * n);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            acc += f(j) * std::cos(M_PI * i * (2 * j + 1) / (2.0 * n));
        }
        a(i) = scale * acc;
    }
    return a;
}

}  // namespace

TEST_CASE("transform matrices are orthonormal") {
    for (int n : {2, 64, 256}) {
        DctPlan plan = fbnn::dct_plan(n);
        Matrix gram = plan.transform * plan.transform.transpose();
        CHECK((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("forward transform matches naive summation") {
    RandomStream s(SeedPath(41).child("naive"));
    DctPlan plan = fbnn::dct_plan(32);
    for (int trial = 0; trial < 20; ++trial) {
        Vector f = s.normal_vector(32);
        Vector fast = fbnn::dct_forward(plan, f);
        Vector slow = naive_dct(f);
        CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("round trip and Parseval") {
    RandomStream s(SeedPath(42).child("parseval"));
    DctPlan plan = fbnn::dct_plan(65);
    Vector f = s.normal_vector(65);
    Vector a = fbnn::dct_forward(plan, f);
    CHECK((fbnn::dct_inverse(plan, a) - f).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(a.norm() == doctest::Approx(f.norm()).epsilon(1e-12));
}

TEST_CASE("constant signal concentrates on coefficient zero") {
    DctPlan plan = fbnn::dct_plan(16);
    Vector f = Vector::Constant(16, 2.0);
    Vector a = fbnn::dct_forward(plan, f);
    // a_0 = sqrt(n) * c for a constant signal c.
    CHECK(a(0) == doctest::Approx(2.0 * std::sqrt(16.0)).epsilon(1e-12));
    CHECK(a.tail(15).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kept counts follow the strict threshold rule") {
    CHECK(fbnn::lowpass_kept_count(256, 0.0) == 256);
    CHECK(fbnn::lowpass_kept_count(256, 1.0) == 0);
    CHECK(fbnn::lowpass_kept_count(256, 0.91) == 24);
    CHECK(fbnn::lowpass_kept_count(256, 0.95) == 13);
    CHECK(fbnn::lowpass_kept_count(64, 0.5) == 32);
    CHECK(fbnn::lowpass_kept_count(2, 0.5) == 1);
}

TEST_CASE("lowpass matrix is the identity at t = 0") {
    DctPlan plan = fbnn::dct_plan(64);
    Matrix c = fbnn::lowpass_matrix(plan, 0.0);
    CHECK((c - Matrix::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("lowpass matrix is symmetric and idempotent") {
    DctPlan plan = fbnn::dct_plan(48);
    for (double t : {0.3, 0.91}) {
        Matrix c = fbnn::lowpass_matrix(plan, t);
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((c * c - c).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("lowpass_apply agrees with the explicit matrix") {
    RandomStream s(SeedPath(43).child("apply"));
    DctPlan plan = fbnn::dct_plan(80);
    Vector f = s.normal_vector(80);
    for (double t : {0.2, 0.5, 0.91, 1.0}) {
        Vector via_matrix = fbnn::lowpass_matrix(plan, t) * f;
        Vector direct = fbnn::lowpass_apply(plan, t, f);
        CHECK((via_matrix - direct).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("lowpass_apply at t = 0 returns the input bitwise") {
    RandomStream s(SeedPath(44).child("bitwise"));
    DctPlan plan = fbnn::dct_plan(33);
    Vector f = s.normal_vector(33);
    Vector g = fbnn::lowpass_apply(plan, 0.0, f);
    CHECK((g - f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("filtering removes exactly the high coefficients") {
    RandomStream s(SeedPath(45).child("removed"));
    DctPlan plan = fbnn::dct_plan(64);
    Vector f = s.normal_vector(64);
    double t = 0.5;
    int kept = fbnn::lowpass_kept_count(64, t);
    Vector a = fbnn::dct_forward(plan, fbnn::lowpass_apply(plan, t, f));
    Vector a0 = fbnn::dct_forward(plan, f);
    CHECK((a.head(kept) - a0.head(kept)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(a.tail(64 - kept).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("energy is nonincreasing in t") {
    RandomStream s(SeedPath(46).child("energy"));
    DctPlan plan = fbnn::dct_plan(64);
    Vector f = s.normal_vector(64);
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {0.0, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        double e = fbnn::lowpass_apply(plan, t, f).norm();
        CHECK(e <= prev + 1e-12);
        prev = e;
    }
}

TEST_CASE("percentile interpolation matches hand values") {
    std::vector<double> sorted{1.0, 2.0, 3.0, 4.0};
    CHECK(fbnn::percentile_of_sorted(sorted, 0.0) == doctest::Approx(1.0));
    CHECK(fbnn::percentile_of_sorted(sorted, 100.0) == doctest::Approx(4.0));
    CHECK(fbnn::percentile_of_sorted(sorted, 50.0) == doctest::Approx(2.5));
    CHECK(fbnn::percentile_of_sorted(sorted, 25.0) == doctest::Approx(1.75));
}

TEST_CASE("spectrum percentiles summarize coefficient magnitudes") {
    DctPlan plan = fbnn::dct_plan(4);
    // Two known functions; coefficient 0 of each is sqrt(4) * mean * ... use
    // constants so the transform is easy: constant c -> a = (2c, 0, 0, 0).
    Matrix samples(2, 4);
    samples.row(0) = Vector::Constant(4, 1.0).transpose();
    samples.row(1) = Vector::Constant(4, -3.0).transpose();
    auto summary = fbnn::spectrum_percentiles(samples, plan, {0.0, 50.0, 100.0});
    // |a_0| over draws = {2, 6}.
    CHECK(summary.values(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(summary.values(0, 1) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(summary.values(0, 2) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(summary.values.row(1).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(summary.percentiles.size() == 3);
}

TEST_CASE("spectrum percentiles of signed coefficients keep the sign") {
    DctPlan plan = fbnn::dct_plan(4);
    Matrix samples(2, 4);
    samples.row(0) = Vector::Constant(4, -1.0).transpose();
    samples.row(1) = Vector::Constant(4, -2.0).transpose();
    auto summary = fbnn::spectrum_percentiles(samples, plan, {100.0}, false);
    CHECK(summary.values(0, 0) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("spectrum percentiles demand at least two draws") {
    DctPlan plan = fbnn::dct_plan(4);
    Matrix samples(1, 4);
    samples.setOnes();
    CHECK_THROWS_AS(fbnn::spectrum_percentiles(samples, plan, {50.0}),
                    std::invalid_argument);
}

TEST_CASE("plans validate their size") {
    CHECK_THROWS_AS(fbnn::dct_plan(0), std::invalid_argument);
    CHECK_THROWS_AS(fbnn::lowpass_kept_count(10, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(fbnn::lowpass_kept_count(10, 1.5), std::invalid_argument);
}

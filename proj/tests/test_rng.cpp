#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "fbnn/rng.hpp"

using fbnn::Matrix;
using fbnn::Vector;
using fbnn::RandomStream;
using fbnn::SeedPath;

TEST_CASE("seed paths are deterministic and label-sensitive") {
    SeedPath root(42);
    CHECK(SeedPath(42).derive() == root.derive());
    CHECK(root.child("chain", 0).derive() == SeedPath(42).child("chain", 0).derive());

    std::set<std::uint64_t> seen;
    seen.insert(root.derive());
    seen.insert(root.child("chain", 0).derive());
    seen.insert(root.child("chain", 1).derive());
    seen.insert(root.child("dataset", 0).derive());
    seen.insert(root.child("chain", 0).child("init", 0).derive());
    seen.insert(SeedPath(43).derive());
    CHECK(seen.size() == 6);
}

TEST_CASE("identical seed paths give identical streams") {
    RandomStream a(SeedPath(7).child("x", 3));
    RandomStream b(SeedPath(7).child("x", 3));
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform() == b.uniform());
}

TEST_CASE("uniform draws lie strictly inside (0,1)") {
    RandomStream s(SeedPath(1).child("uniform"));
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws match N(0,1) moments") {
    RandomStream s(SeedPath(2).child("normal"));
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = s.normal();
        sum += z;
        sumsq += z * z;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("mvn_sample has the requested covariance") {
    Vector mean(1);
    mean << 3.0;
    Matrix cov(1, 1);
    cov << 4.0;
    RandomStream s(SeedPath(3).child("mvn"));
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = mvn_sample(mean, cov, s)(0);
        sum += x;
        sumsq += x * x;
    }
    double m = sum / n;
    double v = sumsq / n - m * m;
    CHECK(m == doctest::Approx(3.0).epsilon(0.01));
    CHECK(std::abs(v - 4.0) < 0.2);
}

TEST_CASE("mvn_sample reproduces cross-covariance") {
    Vector mean = Vector::Zero(2);
    Matrix cov(2, 2);
    cov << 2.0, 1.0,
           1.0, 1.0;
    RandomStream s(SeedPath(4).child("mvn2"));
    const int n = 200000;
    Matrix acc = Matrix::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
        Vector x = mvn_sample(mean, cov, s);
        acc += x * x.transpose();
    }
    acc /= n;
    CHECK((acc - cov).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("mvn_sample with zero covariance returns the mean exactly") {
    Vector mean(3);
    mean << 1.0, -2.0, 0.5;
    Matrix cov = Matrix::Zero(3, 3);
    RandomStream s(SeedPath(5));
    Vector x = mvn_sample(mean, cov, s);
    CHECK(x(0) == 1.0);
    CHECK(x(1) == -2.0);
    CHECK(x(2) == 0.5);
}

TEST_CASE("mvn_sample validates dimensions") {
    Vector mean = Vector::Zero(2);
    Matrix cov = Matrix::Identity(3, 3);
    RandomStream s(SeedPath(6));
    CHECK_THROWS_AS(mvn_sample(mean, cov, s), std::invalid_argument);
}

TEST_CASE("normal_vector matches scalar draws") {
    RandomStream a(SeedPath(8).child("vec"));
    RandomStream b(SeedPath(8).child("vec"));
    Vector v = a.normal_vector(5);
    for (int i = 0; i < 5; ++i) {
        CHECK(v(i) == b.normal());
    }
}

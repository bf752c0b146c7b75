#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmtk/rng.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

using dmtk::CounterRng;

TEST_CASE("same seed and stream replay the same sequence") {
    CounterRng a(42, 3);
    CounterRng b(42, 3);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(a() == b());
}

TEST_CASE("streams under one seed are distinct") {
    CounterRng a(42, 0);
    CounterRng b(42, 1);
    int equal = 0;
    for (int i = 0; i < 1000; ++i)
        equal += a() == b() ? 1 : 0;
    CHECK(equal == 0);
}

TEST_CASE("seeds are distinct at fixed stream") {
    CounterRng a(1, 7);
    CounterRng b(2, 7);
    int equal = 0;
    for (int i = 0; i < 1000; ++i)
        equal += a() == b() ? 1 : 0;
    CHECK(equal == 0);
}

TEST_CASE("uniform ranges exclude the right endpoints") {
    CounterRng rng(7, 0);
    for (int i = 0; i < 100000; ++i) {
        double u = rng.uniform();
        double v = rng.uniform_pos();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("uniform moments") {
    CounterRng rng(11, 0);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        s += u;
        s2 += u * u;
    }
    double mean = s / n;
    double var = s2 / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 0.005);
    CHECK(std::abs(var - 1.0 / 12.0) < 0.005);
}

TEST_CASE("exponential mean is one") {
    CounterRng rng(13, 0);
    const int n = 200000;
    double s = 0;
    for (int i = 0; i < n; ++i)
        s += rng.exponential();
    CHECK(std::abs(s / n - 1.0) < 0.02);
}

TEST_CASE("complex gaussian is circularly symmetric with unit power") {
    CounterRng rng(17, 0);
    const int n = 200000;
    std::complex<double> mean{0, 0}, pseudo{0, 0};
    double power = 0;
    for (int i = 0; i < n; ++i) {
        auto h = rng.complex_gaussian();
        mean += h;
        pseudo += h * h; // vanishes iff real and imaginary parts are iid
        power += std::norm(h);
    }
    CHECK(std::abs(mean) / n < 0.01);
    CHECK(std::abs(pseudo) / n < 0.01);
    CHECK(std::abs(power / n - 1.0) < 0.02);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qpm/numeric.hpp"

using namespace qpm;

TEST_CASE("bracketed root finder") {
    auto f = [](double x) { return x * x - 2.0; };
    double r = find_root_bracketed(f, 0.0, 2.0, 1e-10);
    CHECK(r == Catch::Approx(std::sqrt(2.0)).margin(1e-9));

    CHECK_THROWS_AS(find_root_bracketed(f, 2.0, 3.0), std::invalid_argument);

    // root at a bracket edge
    CHECK(find_root_bracketed([](double x) { return x; }, 0.0, 1.0) == 0.0);
}

TEST_CASE("simpson quadrature on smooth integrands") {
    CHECK(simpson([](double x) { return x * x; }, 0.0, 1.0, 16)
          == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(simpson([](double x) { return std::sin(x); }, 0.0, pi, 64)
          == Catch::Approx(2.0).epsilon(1e-8));
    cplx g = simpson_complex([](double x) { return std::polar(1.0, x); }, 0.0, pi / 2, 64);
    CHECK(g.real() == Catch::Approx(1.0).epsilon(1e-8));
    CHECK(g.imag() == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("linear interpolation") {
    LinearInterpolator li({0.0, 1.0, 3.0}, {0.0, 2.0, 2.0});
    CHECK(li(0.5) == Catch::Approx(1.0));
    CHECK(li(2.0) == Catch::Approx(2.0));
    CHECK(li(-1.0) == 0.0);   // clamped
    CHECK(li(10.0) == 2.0);
    CHECK_THROWS_AS(LinearInterpolator({1.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("fft matches direct DFT and round-trips") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 64;
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(u(rng), u(rng));

    auto direct = [&](int k) {
        cplx s(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            s += x[j] * std::polar(1.0, -two_pi * static_cast<double>(j) * k / n);
        return s;
    };
    std::vector<cplx> y = x;
    fft(y);
    for (int k : {0, 1, 5, 31, 63})
        CHECK(std::abs(y[static_cast<std::size_t>(k)] - direct(k)) < 1e-10);

    ifft(y);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(y[j] - x[j]) < 1e-12);

    std::vector<cplx> bad(12);
    CHECK_THROWS_AS(fft(bad), std::invalid_argument);
}

TEST_CASE("parallel_for covers the range once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
}

TEST_CASE("fnv1a hashing is stable") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") != fnv1a64_hex("b"));
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "disg/rng.hpp"

TEST_CASE("same seed reproduces the same raw stream") {
    disg::Rng a(12345), b(12345);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    disg::Rng a(1), b(2);
    bool differs = false;
    for (int i = 0; i < 16 && !differs; ++i) differs = a.next_u64() != b.next_u64();
    REQUIRE(differs);
}

TEST_CASE("uniform01 stays in [0,1) with a sane mean") {
    disg::Rng rng(7);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(std::abs(sum / n - 0.5) < 0.02);
}

TEST_CASE("pick_index covers the range roughly uniformly") {
    disg::Rng rng(11);
    const std::size_t n = 5;
    std::vector<int> hits(n, 0);
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const std::size_t k = rng.pick_index(n);
        REQUIRE(k < n);
        ++hits[k];
    }
    for (int h : hits) REQUIRE(std::abs(h / static_cast<double>(trials) - 0.2) < 0.02);
    REQUIRE_THROWS_AS(rng.pick_index(0), std::invalid_argument);
}

TEST_CASE("sample_discrete follows the weights") {
    disg::Rng rng(3);
    const std::vector<double> probs = {0.4, 0.6};
    int first = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i)
        if (rng.sample_discrete(probs) == 0) ++first;
    REQUIRE(std::abs(first / static_cast<double>(trials) - 0.4) < 0.02);
}

TEST_CASE("sample_discrete on a point mass always returns its support") {
    disg::Rng rng(5);
    const std::vector<double> probs = {0.0, 1.0, 0.0};
    for (int i = 0; i < 100; ++i) REQUIRE(rng.sample_discrete(probs) == 1);
}

TEST_CASE("sample_discrete rejects an empty distribution") {
    disg::Rng rng(1);
    REQUIRE_THROWS_AS(rng.sample_discrete({}), std::invalid_argument);
}

TEST_CASE("sample_discrete shortfall lands on a supported index") {
    // Weights that sum slightly below 1: the remainder must map to the last
    // positive entry, never past the end and never onto a zero entry.
    disg::Rng rng(9);
    const std::vector<double> probs = {0.3, 0.3, 0.3, 0.0};
    for (int i = 0; i < 10000; ++i) {
        const std::size_t k = rng.sample_discrete(probs);
        REQUIRE(k < 3);
    }
}

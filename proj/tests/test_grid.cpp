#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "kdefft/grid.hpp"
#include "test_util.hpp"

using kdefft::GridCounts;
using kdefft::GridSpec;
using kdefft::SampleMatrix;

namespace {

SampleMatrix sample_from(std::vector<std::vector<double>> rows) {
    SampleMatrix m;
    m.n = rows.size();
    m.dim = static_cast<int>(rows[0].size());
    for (const auto& r : rows) m.points.insert(m.points.end(), r.begin(), r.end());
    return m;
}

}  // namespace

TEST_CASE("make_grid spans the data") {
    auto data = sample_from({{0, 0}, {1, 1}, {0.5, 0.2}});
    auto g = kdefft::make_grid(data, {5, 5}, {0, 0});
    CHECK(g.lower == std::vector<double>{0, 0});
    CHECK(g.upper == std::vector<double>{1, 1});
    CHECK(g.binwidths[0] == Catch::Approx(0.25));
    CHECK(g.binwidths[1] == Catch::Approx(0.25));
}

TEST_CASE("make_grid applies the extension") {
    auto data = sample_from({{0}, {10}});
    auto g = kdefft::make_grid(data, {11}, {1});
    CHECK(g.lower[0] == Catch::Approx(-1));
    CHECK(g.upper[0] == Catch::Approx(11));
    CHECK(g.binwidths[0] == Catch::Approx(1.2));
}

TEST_CASE("make_grid rejects degenerate and bad sizes") {
    auto data = sample_from({{3, 1}, {3, 2}});
    CHECK_THROWS_AS(kdefft::make_grid(data, {8, 8}, {0, 0}), kdefft::DegenerateRange);
    auto ok = sample_from({{0, 0}, {1, 1}});
    CHECK_THROWS_AS(kdefft::make_grid(ok, {1, 8}, {0, 0}), kdefft::BadGridSize);
}

TEST_CASE("default_extension") {
    auto h = kdefft::BandwidthMatrix::validate(2, {1, 0, 0, 1});
    CHECK(kdefft::default_extension(h, 3.7) == std::vector<double>{3.7, 3.7});
    auto h2 = kdefft::BandwidthMatrix::validate(2, {4, 0, 0, 1});
    auto e2 = kdefft::default_extension(h2, 3.7);
    CHECK(e2[0] == Catch::Approx(7.4));
    CHECK(e2[1] == Catch::Approx(3.7));
    auto h3 = kdefft::BandwidthMatrix::validate(2, {1, 0.5, 0.5, 1});
    CHECK(kdefft::default_extension(h3, 2.0) == std::vector<double>{2.0, 2.0});
}

TEST_CASE("point at a grid node gets weight one") {
    auto data = sample_from({{0.5, 0.25}});
    GridSpec g;
    g.dim = 2;
    g.lower = {0, 0};
    g.upper = {1, 1};
    g.sizes = {5, 5};
    g.binwidths = {0.25, 0.25};
    auto c = kdefft::linear_binning(data, g);
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < c.values.size(); ++i)
        if (c.values[i] != 0.0) ++nonzero;
    CHECK(nonzero == 1);
    std::vector<std::size_t> idx{2, 1};
    CHECK(c.values.at(idx) == Catch::Approx(1.0));
}

TEST_CASE("cell-center point splits over four corners") {
    auto data = sample_from({{0.125, 0.125}});
    GridSpec g;
    g.dim = 2;
    g.lower = {0, 0};
    g.upper = {1, 1};
    g.sizes = {5, 5};
    g.binwidths = {0.25, 0.25};
    auto c = kdefft::linear_binning(data, g);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            std::vector<std::size_t> idx{a, b};
            CHECK(c.values.at(idx) == Catch::Approx(0.25));
        }
}

TEST_CASE("upper boundary point lands on the last node") {
    auto data = sample_from({{1.0}});
    GridSpec g;
    g.dim = 1;
    g.lower = {0};
    g.upper = {1};
    g.sizes = {5};
    g.binwidths = {0.25};
    auto c = kdefft::linear_binning(data, g);
    CHECK(c.values[4] == Catch::Approx(1.0));
    CHECK(c.clamped == 0);
}

TEST_CASE("outside points are clamped, conservation holds") {
    auto data = sample_from({{-2.0}, {0.4}, {3.0}});
    GridSpec g;
    g.dim = 1;
    g.lower = {0};
    g.upper = {1};
    g.sizes = {5};
    g.binwidths = {0.25};
    auto c = kdefft::linear_binning(data, g);
    CHECK(c.clamped == 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < c.values.size(); ++i) sum += c.values[i];
    CHECK(sum == Catch::Approx(3.0).margin(1e-9 * 3));
}

TEST_CASE("dimension mismatch is rejected") {
    auto data = sample_from({{0.5, 0.5}});
    GridSpec g;
    g.dim = 1;
    g.lower = {0};
    g.upper = {1};
    g.sizes = {5};
    g.binwidths = {0.25};
    CHECK_THROWS_AS(kdefft::linear_binning(data, g), kdefft::DimensionMismatch);
}

TEST_CASE("conservation, first moment and locality on random data") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const std::size_t n = 100;
        std::uniform_real_distribution<double> ud(0.05, 0.95);
        SampleMatrix data;
        data.n = n;
        data.dim = d;
        data.points.resize(n * d);
        for (double& v : data.points) v = ud(rng);

        GridSpec g;
        g.dim = d;
        g.lower.assign(d, 0.0);
        g.upper.assign(d, 1.0);
        g.sizes.assign(d, 9);
        g.binwidths.assign(d, 1.0 / 8);
        auto c = kdefft::linear_binning(data, g);
        CHECK(c.clamped == 0);

        double sum = 0.0;
        for (std::size_t i = 0; i < c.values.size(); ++i) sum += c.values[i];
        CHECK(sum == Catch::Approx(static_cast<double>(n)).margin(1e-9 * n));

        // count-weighted node mean equals the sample mean
        for (int k = 0; k < d; ++k) {
            double grid_mean = 0.0;
            std::vector<std::size_t> idx(d, 0);
            std::size_t flat = 0;
            do {
                grid_mean += c.values[flat++] * g.node(k, idx[k]);
            } while (kdefft::NdArray<double>::next_index(idx, g.sizes));
            grid_mean /= static_cast<double>(n);
            double sample_mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) sample_mean += data.points[i * d + k];
            sample_mean /= static_cast<double>(n);
            CHECK(grid_mean == Catch::Approx(sample_mean).margin(1e-9));
        }

        // one point touches at most 2^d nodes
        SampleMatrix one;
        one.n = 1;
        one.dim = d;
        one.points.assign(data.points.begin(), data.points.begin() + d);
        auto c1 = kdefft::linear_binning(one, g);
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < c1.values.size(); ++i)
            if (c1.values[i] != 0.0) ++nonzero;
        CHECK(nonzero <= (1u << d));

        // row permutation leaves the counts unchanged up to roundoff
        SampleMatrix shuffled = data;
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k)
                shuffled.points[i * d + k] = data.points[order[i] * d + k];
        auto c2 = kdefft::linear_binning(shuffled, g);
        CHECK(testutil::max_abs_diff(c.values, c2.values) < 1e-12 * n);
    }
}

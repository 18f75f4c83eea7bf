#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "bqfl/projection.hpp"
#include "oracles.hpp"

using namespace bqfl;

TEST_CASE("only the varying coordinate survives k = 1") {
    const auto vs = VectorSet::from_rows({{1, 0, 9}, {1, 0, 1}, {1, 0, 5}});
    const auto p = importance_project(vs, {1});
    CHECK(p.coordinate_indices == std::vector<std::size_t>{2});
    CHECK(p.values(0, 0) == 9);
    CHECK(p.values(1, 0) == 1);
    CHECK(p.values(2, 0) == 5);
    CHECK_FALSE(p.clamped);
}

TEST_CASE("k at or above d keeps every coordinate in order") {
    const auto vs = VectorSet::from_rows({{3, 1, 2}, {0, 5, 1}});
    for (const std::size_t k : {3, 10}) {
        const auto p = importance_project(vs, {k});
        CHECK(p.coordinate_indices == std::vector<std::size_t>{0, 1, 2});
        CHECK(p.values(1, 1) == 5);
        CHECK(p.clamped == (k > 3));
    }
}

TEST_CASE("selected indices match an independent variance sort") {
    const auto pts = oracle::random_points(4, 10, 99);
    const auto p = importance_project(VectorSet::from_rows(pts), {3});

    std::vector<double> var(10);
    for (std::size_t j = 0; j < 10; ++j) {
        double mean = 0.0;
        for (const auto& r : pts) {
            mean += r[j] / 4.0;
        }
        for (const auto& r : pts) {
            var[j] += (r[j] - mean) * (r[j] - mean) / 4.0;
        }
    }
    std::vector<std::size_t> order(10);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return var[a] > var[b]; });
    std::vector<std::size_t> top(order.begin(), order.begin() + 3);
    std::sort(top.begin(), top.end());
    CHECK(p.coordinate_indices == top);
}

TEST_CASE("variance ties go to the lower coordinate") {
    const auto vs = VectorSet::from_rows({{1, 1, 1, 0}, {-1, -1, -1, 0}});
    CHECK(importance_project(vs, {2}).coordinate_indices == std::vector<std::size_t>{0, 1});
}

TEST_CASE("projection properties on random inputs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto pts = oracle::random_points(5, 30, seed);
        const auto vs = VectorSet::from_rows(pts);
        const auto p = importance_project(vs, {7});
        const auto var = coordinate_variance(vs);
        REQUIRE(p.coordinate_indices.size() == 7);
        CHECK(std::is_sorted(p.coordinate_indices.begin(), p.coordinate_indices.end()));
        CHECK(std::adjacent_find(p.coordinate_indices.begin(), p.coordinate_indices.end()) ==
              p.coordinate_indices.end());
        double min_kept = 1e300, max_dropped = -1.0;
        for (std::size_t j = 0; j < 30; ++j) {
            const bool kept = std::binary_search(p.coordinate_indices.begin(), p.coordinate_indices.end(), j);
            if (kept) {
                min_kept = std::min(min_kept, var[j]);
            } else {
                max_dropped = std::max(max_dropped, var[j]);
            }
        }
        CHECK(min_kept >= max_dropped);

        std::reverse(pts.begin(), pts.end());
        CHECK(importance_project(VectorSet::from_rows(pts), {7}).coordinate_indices == p.coordinate_indices);
    }
}

TEST_CASE("projection needs two gradients") {
    CHECK_THROWS(importance_project(VectorSet::from_rows({{1, 2}}), {1}));
    CHECK_THROWS(importance_project(VectorSet::from_rows({{1, 2}, {3, 4}}), {0}));
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bqfl/distance.hpp"
#include "oracles.hpp"

using namespace bqfl;

namespace {

DistanceMatrix from(const oracle::Matrix& m, Metric metric) {
    std::vector<double> flat;
    for (const auto& r : m) {
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return DistanceMatrix(m.size(), flat, metric);
}

void check_invariants(const DistanceMatrix& d, double hi) {
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d(i, i) == 0.0);
        for (std::size_t j = 0; j < d.size(); ++j) {
            CHECK(d(i, j) == d(j, i));
            CHECK(d(i, j) >= 0.0);
            CHECK(d(i, j) <= hi);
        }
    }
}

}  // namespace

TEST_CASE("cosine distance of identical, orthogonal and opposite vectors") {
    const auto d = cosine_matrix(VectorSet::from_rows({{3, 4}, {3, 4}, {-4, 3}, {-3, -4}}));
    CHECK(std::abs(d(0, 1)) < 1e-8);
    CHECK(std::abs(d(0, 2) - 1.0) < 1e-8);
    CHECK(std::abs(d(0, 3) - 2.0) < 1e-8);
    CHECK(d(0, 0) == 0.0);
}

TEST_CASE("two zero vectors sit at cosine distance one") {
    const auto d = cosine_matrix(VectorSet::from_rows({{0, 0}, {0, 0}}));
    CHECK(d(0, 1) == 1.0);
}

TEST_CASE("cosine distance ignores positive scaling") {
    auto pts = oracle::random_points(5, 6, 4);
    const auto a = cosine_matrix(VectorSet::from_rows(pts));
    for (auto& v : pts[2]) {
        v *= 37.5;
    }
    const auto b = cosine_matrix(VectorSet::from_rows(pts));
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(std::abs(a(i, j) - b(i, j)) < 1e-6);
        }
    }
}

TEST_CASE("euclidean distances") {
    const auto d = euclidean_matrix(VectorSet::from_rows({{0, 0}, {3, 4}, {3, 4}}));
    CHECK(d(0, 1) == 5.0);
    CHECK(d(1, 2) == 0.0);

    const auto pts = oracle::random_points(5, 7, 8);
    const auto e = euclidean_matrix(VectorSet::from_rows(pts));
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(std::abs(e(i, j) - std::sqrt(oracle::sq_dist(pts[i], pts[j]))) < 1e-12);
        }
    }
}

TEST_CASE("normalized euclidean divides by the largest entry") {
    const auto d = normalize_euclidean(from({{0, 0, 2}, {0, 0, 4}, {2, 4, 0}}, Metric::euclidean));
    CHECK(d.metric() == Metric::euclidean_norm);
    CHECK(d(0, 1) == 0.0);
    CHECK(d(0, 2) == 0.5);
    CHECK(d(1, 2) == 1.0);

    const auto z = normalize_euclidean(euclidean_matrix(VectorSet::from_rows({{1, 1}, {1, 1}, {1, 1}})));
    CHECK(z.max_entry() == 0.0);
}

TEST_CASE("dual blend endpoints and midpoint") {
    const auto de = from({{0, 0.4}, {0.4, 0}}, Metric::euclidean_norm);
    const auto dc = from({{0, 0.8}, {0.8, 0}}, Metric::cosine);
    CHECK(dual_blend(de, dc, 1.0)(0, 1) == 0.4);
    CHECK(dual_blend(de, dc, 0.0)(0, 1) == 0.8);
    CHECK(dual_blend(de, dc, 0.5)(0, 1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(dual_blend(de, dc, 0.5).metric() == Metric::dual);

    const auto dc3 = cosine_matrix(VectorSet::from_rows({{1, 0}, {0, 1}, {1, 1}}));
    CHECK_THROWS_AS(dual_blend(de, dc3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(dual_blend(de, dc, 1.5), std::invalid_argument);
}

TEST_CASE("all four matrices satisfy the invariants on random inputs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto vs = VectorSet::from_rows(oracle::random_points(8, 5, seed));
        const auto dc = cosine_matrix(vs);
        const auto de = euclidean_matrix(vs);
        const auto dn = normalize_euclidean(de);
        check_invariants(dc, 2.0);
        check_invariants(de, 1e300);
        check_invariants(dn, 1.0);
        check_invariants(dual_blend(dn, dc, 0.5), 2.0);
    }
}

TEST_CASE("construction rejects broken matrices") {
    CHECK_THROWS_AS(from({{0, 1}, {2, 0}}, Metric::euclidean), std::invalid_argument);
    CHECK_THROWS_AS(from({{1, 1}, {1, 0}}, Metric::euclidean), std::invalid_argument);
    CHECK_THROWS_AS(from({{0, -1}, {-1, 0}}, Metric::euclidean), std::invalid_argument);
    CHECK_THROWS_AS(from({{0, 1.5}, {1.5, 0}}, Metric::euclidean_norm), std::invalid_argument);
    CHECK_THROWS_AS(from({{0, 2.5}, {2.5, 0}}, Metric::cosine), std::invalid_argument);
    CHECK_THROWS_AS(DistanceMatrix(3, {0, 0}, Metric::cosine), std::invalid_argument);
}

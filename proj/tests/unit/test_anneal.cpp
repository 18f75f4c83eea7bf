#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bqfl/anneal.hpp"
#include "oracles.hpp"

using namespace bqfl;

namespace {

QuboModel random_qubo(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QuboModel q(n, n / 2, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        q.set_linear(i, u(gen));
        for (std::size_t j = i + 1; j < n; ++j) {
            q.set_quadratic(i, j, u(gen));
        }
    }
    return q;
}

oracle::Exact exact(const QuboModel& q) {
    const std::size_t n = q.size();
    std::vector<double> lin(q.linear().begin(), q.linear().end());
    oracle::Matrix quad(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            quad[i][j] = q.quadratic(i, j);
        }
    }
    return oracle::enumerate_min(lin, quad);
}

QuboModel triangle_qubo() {
    return QuboModel({-87, -86, -85}, {{{0, 1}, 58.0}, {{0, 2}, 56.0}, {{1, 2}, 54.0}}, 2, 30.0);
}

AnnealConfig small(std::uint64_t seed) {
    AnnealConfig c;
    c.reads = 50;
    c.sweeps_per_read = 200;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("single variable") {
    const QuboModel q({-5.0}, {}, 1, 1.0);
    const auto s = simulated_anneal(q, small(1));
    CHECK(s.best_assignment == Assignment{1});
    CHECK(s.best_energy == -5.0);
    CHECK(s.all_read_energies.size() == 50);
}

TEST_CASE("three-client QUBO") {
    const auto q = triangle_qubo();
    const auto s = simulated_anneal(q, small(2));
    CHECK(s.best_energy == -117.0);
    CHECK(s.best_assignment == Assignment{0, 1, 1});

    const auto e = brute_force_solve(q);
    CHECK(e.energy == -117.0);
    CHECK(e.assignment == Assignment{0, 1, 1});
}

TEST_CASE("annealer is sound and usually exact on random QUBOs") {
    AnnealConfig cfg;
    cfg.reads = 100;
    cfg.sweeps_per_read = 500;
    int hits = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const std::size_t n = 2 + k % 11;
        const auto q = random_qubo(n, k);
        cfg.seed = k;
        const auto s = simulated_anneal(q, cfg);
        const auto ref = exact(q);
        CHECK(s.best_energy >= ref.energy - 1e-9);
        CHECK(s.best_energy == doctest::Approx(energy(q, s.best_assignment)).epsilon(1e-12));
        if (s.best_energy <= ref.energy + 1e-9) {
            ++hits;
        }
    }
    CHECK(hits >= 95);
}

TEST_CASE("brute force agrees with the enumeration oracle, ties included") {
    for (std::uint64_t k = 0; k < 60; ++k) {
        const std::size_t n = 1 + k % 12;
        auto q = random_qubo(n, k + 1000);
        if (k % 3 == 0) {
            // Round coefficients so many assignments share the minimum.
            for (std::size_t i = 0; i < n; ++i) {
                q.set_linear(i, std::round(q.linear(i)));
                for (std::size_t j = i + 1; j < n; ++j) {
                    q.set_quadratic(i, j, std::round(q.quadratic(i, j)));
                }
            }
        }
        const auto ref = exact(q);
        const auto got = brute_force_solve(q);
        CHECK(got.energy == doctest::Approx(ref.energy).epsilon(1e-12));
        CHECK(std::vector<int>(got.assignment.begin(), got.assignment.end()) == ref.x);
        CHECK(got.energy == energy(q, got.assignment));
    }
}

TEST_CASE("all-zero model resolves to the all-zero assignment") {
    const QuboModel q(5, 2, 1.0);
    const auto e = brute_force_solve(q);
    CHECK(e.assignment == Assignment(5, 0));
    CHECK(e.energy == 0.0);
}

TEST_CASE("brute force refuses large instances") {
    CHECK_THROWS_WITH(brute_force_solve(QuboModel(25, 3, 1.0)), "instance too large for exact solve");
}

TEST_CASE("results depend on the seed only") {
    const auto q = random_qubo(12, 77);
    auto cfg = small(9);
    cfg.workers = 1;
    const auto a = simulated_anneal(q, cfg);
    cfg.workers = 4;
    const auto b = simulated_anneal(q, cfg);
    CHECK(a.best_assignment == b.best_assignment);
    CHECK(a.all_read_energies == b.all_read_energies);
    const auto c = simulated_anneal(q, cfg);
    CHECK(c.all_read_energies == a.all_read_energies);
}

TEST_CASE("invalid schedules are rejected") {
    const auto q = triangle_qubo();
    auto cfg = small(1);
    cfg.reads = 0;
    CHECK_THROWS_AS(simulated_anneal(q, cfg), std::invalid_argument);
    cfg = small(1);
    cfg.sweeps_per_read = 0;
    CHECK_THROWS_AS(simulated_anneal(q, cfg), std::invalid_argument);
    cfg = small(1);
    cfg.beta_start = 0.0;
    CHECK_THROWS_AS(simulated_anneal(q, cfg), std::invalid_argument);
    cfg = small(1);
    cfg.beta_end = 0.01;
    CHECK_THROWS_AS(simulated_anneal(q, cfg), std::invalid_argument);
}

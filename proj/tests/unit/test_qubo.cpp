#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bqfl/qubo.hpp"
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

DistanceMatrix triangle() { return from({{0, 1, 2}, {1, 0, 3}, {2, 3, 0}}, Metric::euclidean); }

Assignment bits(std::uint64_t code, std::size_t n) {
    Assignment x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<std::uint8_t>((code >> i) & 1U);
    }
    return x;
}

std::size_t popcount(const Assignment& x) {
    std::size_t k = 0;
    for (auto v : x) {
        k += v;
    }
    return k;
}

}  // namespace

TEST_CASE("three-client selection QUBO by hand") {
    const auto q = build_selection_qubo(triangle(), 2);
    CHECK(q.lambda() == 30.0);
    CHECK(q.target() == 2);
    CHECK(q.linear(0) == -87.0);
    CHECK(q.linear(1) == -86.0);
    CHECK(q.linear(2) == -85.0);
    CHECK(q.quadratic(0, 1) == 58.0);
    CHECK(q.quadratic(0, 2) == 56.0);
    CHECK(q.quadratic(1, 2) == 54.0);
    CHECK(q.quadratic(2, 1) == 54.0);

    CHECK(energy(q, Assignment{0, 0, 0}) == 0.0);
    CHECK(energy(q, Assignment{1, 1, 0}) == -115.0);
    CHECK(energy(q, Assignment{0, 1, 1}) == -117.0);

    double best = 1e300;
    Assignment arg;
    for (std::uint64_t c = 0; c < 8; ++c) {
        const auto x = bits(c, 3);
        if (energy(q, x) < best) {
            best = energy(q, x);
            arg = x;
        }
    }
    CHECK(popcount(arg) == 2);
    CHECK(arg == Assignment{0, 1, 1});
}

TEST_CASE("zero distances force lambda to one") {
    const auto d = from({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, Metric::cosine);
    CHECK(penalty_weight(d) == 1.0);
    const auto q = build_selection_qubo(d, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(q.linear(i) == -1.0);
    }
    CHECK(q.quadratic(0, 1) == 2.0);
    CHECK(q.quadratic(0, 2) == 2.0);
    CHECK(q.quadratic(1, 2) == 2.0);
}

TEST_CASE("model energy matches a term-by-term oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 3 + seed % 6;
        const auto d = oracle::random_symmetric(n, seed, 2.0);
        const auto q = build_selection_qubo(from(d, Metric::cosine), n / 2);
        std::vector<double> lin(q.linear().begin(), q.linear().end());
        oracle::Matrix quad(n, std::vector<double>(n, 0.0));
        for (const auto& [key, v] : q.quadratic_terms()) {
            quad[key.first][key.second] = v;
        }
        for (std::uint64_t c = 0; c < (1U << n); ++c) {
            const auto x = bits(c, n);
            const std::vector<int> xi(x.begin(), x.end());
            CHECK(energy(q, x) == doctest::Approx(oracle::qubo_energy(lin, quad, xi)).epsilon(1e-12));
        }
    }
}

TEST_CASE("energy decomposes into cut objective plus cardinality penalty") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 4 + seed % 7;
        const std::size_t m = 1 + seed % (n - 1);
        const auto raw = oracle::random_symmetric(n, seed + 50, 2.0);
        const auto d = from(raw, Metric::dual);
        const auto q = build_selection_qubo(d, m);
        const double lam = q.lambda();
        for (std::uint64_t c = 0; c < (1U << n); ++c) {
            const auto x = bits(c, n);
            const double k = static_cast<double>(popcount(x));
            const double mm = static_cast<double>(m);
            const double expected = selection_objective(d, x) + lam * (k - mm) * (k - mm) - lam * mm * mm;
            CHECK(energy(q, x) == doctest::Approx(expected).epsilon(1e-10).scale(lam * mm * mm));
            if (popcount(x) == m) {
                const std::vector<int> xi(x.begin(), x.end());
                CHECK(selection_objective(d, x) == doctest::Approx(oracle::cut_value(raw, xi)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("exhaustive minimizers of pipeline QUBOs are feasible") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 4 + seed % 7;
        const std::size_t m = 1 + seed % (n - 1);
        const auto q = build_selection_qubo(from(oracle::random_symmetric(n, seed + 900, 2.0), Metric::cosine), m);
        const double best_energy = [&] {
            double b = 1e300;
            for (std::uint64_t c = 0; c < (1U << n); ++c) {
                b = std::min(b, energy(q, bits(c, n)));
            }
            return b;
        }();
        for (std::uint64_t c = 0; c < (1U << n); ++c) {
            const auto x = bits(c, n);
            if (std::abs(energy(q, x) - best_energy) < 1e-9) {
                CHECK(popcount(x) == m);
            }
        }
    }
}

TEST_CASE("energy rejects a wrong-length assignment") {
    const auto q = build_selection_qubo(triangle(), 2);
    CHECK_THROWS_AS(energy(q, Assignment{1, 0}), std::invalid_argument);
}

TEST_CASE("suspicion term") {
    const auto d = from({{0, 0, 0.1}, {0, 0, 0.1}, {0.1, 0.1, 0}}, Metric::dual);
    const auto s = build_suspicion_qubo(d, 2, SuspicionConfig{25.0, 10.0});
    CHECK(s.tau_s == doctest::Approx(0.05).epsilon(1e-14));
    const double two_lambda = 2.0 * s.model.lambda();
    CHECK(s.model.quadratic(0, 1) - two_lambda == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.model.quadratic(0, 2) - two_lambda == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(s.model.quadratic(1, 2) - two_lambda == doctest::Approx(-0.2).epsilon(1e-12));

    const auto plain = build_selection_qubo(d, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s.model.linear(i) == plain.linear(i));
    }
}

TEST_CASE("uniform distances make the suspicion term vanish") {
    const auto d = from({{0, 0.3, 0.3}, {0.3, 0, 0.3}, {0.3, 0.3, 0}}, Metric::dual);
    const auto s = build_suspicion_qubo(d, 2, SuspicionConfig{});
    CHECK(s.tau_s == doctest::Approx(0.3).epsilon(1e-15));
    const auto plain = build_selection_qubo(d, 2);
    CHECK(s.model.quadratic_terms() == plain.quadratic_terms());
}

TEST_CASE("percentile interpolates linearly") {
    CHECK(percentile({4, 1, 3, 2}, 0) == 1.0);
    CHECK(percentile({4, 1, 3, 2}, 100) == 4.0);
    CHECK(percentile({4, 1, 3, 2}, 50) == 2.5);
    CHECK(percentile({0, 10}, 10) == doctest::Approx(1.0));
    CHECK(percentile({7}, 10) == 7.0);
    CHECK_THROWS(percentile({}, 10));
}

TEST_CASE("cardinality repair") {
    const auto d = triangle();
    CHECK(repair_cardinality(Assignment{0, 1, 1}, d, 2) == std::vector<std::size_t>{1, 2});
    CHECK(repair_cardinality(Assignment{1, 1, 1}, d, 2) == std::vector<std::size_t>{0, 1});
    CHECK(repair_cardinality(Assignment{0, 0, 0}, d, 2) == std::vector<std::size_t>{0, 1});
    CHECK(repair_cardinality(Assignment{0, 0, 1}, d, 2) == std::vector<std::size_t>{0, 2});
    CHECK(repair_cardinality(Assignment{1, 1, 1}, d, 3) == std::vector<std::size_t>{0, 1, 2});

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 6;
        const auto r = from(oracle::random_symmetric(n, seed), Metric::cosine);
        for (std::uint64_t c = 0; c < (1U << n); ++c) {
            CHECK(repair_cardinality(bits(c, n), r, 3).size() == 3);
        }
    }
}

TEST_CASE("text serialization round-trips exactly") {
    const auto d = from(oracle::random_symmetric(6, 4, 2.0), Metric::cosine);
    const auto q = build_suspicion_qubo(d, 4, SuspicionConfig{}).model;
    std::stringstream buf;
    write_qubo(buf, q);
    const auto back = read_qubo(buf);
    CHECK(back.size() == q.size());
    CHECK(back.target() == q.target());
    CHECK(back.lambda() == q.lambda());
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(back.linear(i) == q.linear(i));
    }
    CHECK(back.quadratic_terms() == q.quadratic_terms());

    std::stringstream bad("3 2 30\n0 7 1.0\n");
    CHECK_THROWS(read_qubo(bad));
    std::stringstream empty("");
    CHECK_THROWS(read_qubo(empty));
}

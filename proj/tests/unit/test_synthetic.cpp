#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bqfl/rng.hpp"
#include "bqfl/synthetic.hpp"

using namespace bqfl;

TEST_CASE("vanishing noise reproduces the center") {
    SyntheticSourceConfig cfg;
    cfg.d = 6;
    cfg.honest_noise_std = 1e-14;
    const std::vector<double> center{0.5, -1.0, 2.0, 0.0, 3.0, -0.25};
    RandomStream rng(1);
    for (const auto& g : synthetic_honest_gradients(cfg, center, 5, rng)) {
        for (std::size_t j = 0; j < cfg.d; ++j) {
            CHECK(std::abs(g[j] - center[j]) < 1e-12);
        }
    }
}

TEST_CASE("sample mean and spread match the configuration") {
    SyntheticSourceConfig cfg;
    cfg.d = 4;
    cfg.honest_noise_std = 0.3;
    const std::vector<double> center{1.0, -2.0, 0.0, 0.5};
    const std::size_t draws = 10000;
    RandomStream rng(7);
    const auto grads = synthetic_honest_gradients(cfg, center, draws, rng);
    const double nd = static_cast<double>(draws);
    for (std::size_t j = 0; j < cfg.d; ++j) {
        double sum = 0.0, sq = 0.0;
        for (const auto& g : grads) {
            sum += g[j];
            sq += g[j] * g[j];
        }
        const double mean = sum / nd;
        const double sd = std::sqrt(sq / nd - mean * mean);
        CHECK(std::abs(mean - center[j]) <= 3.0 * 0.3 / std::sqrt(nd));
        CHECK(std::abs(sd - 0.3) <= 3.0 * 0.3 / std::sqrt(2.0 * nd));
    }
}

TEST_CASE("source is seeded and ordered") {
    SyntheticSourceConfig cfg;
    cfg.d = 10;
    SyntheticSource a(cfg, 3), b(cfg, 3), c(cfg, 4);
    const auto ga = a.honest_gradients(0, 4);
    CHECK(ga == b.honest_gradients(0, 4));
    CHECK(ga != c.honest_gradients(0, 4));
    CHECK(ga.size() == 4);
    CHECK(ga[0].size() == 10);
    const auto before = a.center();
    a.honest_gradients(1, 4);
    CHECK(a.center() != before);
    a.honest_gradients(5, 4);
    CHECK_THROWS_AS(a.honest_gradients(2, 4), std::logic_error);
}

TEST_CASE("invalid configuration") {
    SyntheticSourceConfig cfg;
    cfg.d = 0;
    CHECK_THROWS(cfg.validate());
    cfg.d = 5;
    cfg.honest_noise_std = 0.0;
    CHECK_THROWS(cfg.validate());
}

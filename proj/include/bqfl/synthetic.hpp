#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bqfl/core_model.hpp"
#include "bqfl/rng.hpp"

namespace bqfl {

/*
 * Synthetic honest-gradient source. Honest client i in round t draws
 *
 *     G_i = a_i g*(t) + o_i + s_i xi,   xi ~ N(0, I)
 *
 * where g*(0) = center_scale (center_bias + N(0, I)), g*(t+1) = g*(t) +
 * honest_center_drift N(0, I), a_i and s_i / honest_noise_std are lognormal
 * per-round factors (spread 0 fixes them at 1), and o_i is a per-client fixed
 * offset (non-IID proxy, zero by default).
 */
struct SyntheticSourceConfig {
    std::size_t d = 2000;
    double center_scale = 0.01;
    double center_bias = 0.0;
    double honest_center_drift = 0.0001;
    double honest_noise_std = 0.01;
    double magnitude_spread = 0.0;
    double noise_spread = 0.0;
    double client_offset_std = 0.0;

    void validate() const;
};

/// G_i = center + N(0, honest_noise_std^2 I) for each of n_honest clients, drawn from `stream`.
std::vector<GradientVector> synthetic_honest_gradients(const SyntheticSourceConfig& config,
                                                       const std::vector<double>& center, std::size_t n_honest,
                                                       RandomStream& stream);

class SyntheticSource {
public:
    SyntheticSource(SyntheticSourceConfig config, std::uint64_t seed);

    /// Honest gradients for the 0-based round; rounds must be requested in order.
    std::vector<GradientVector> honest_gradients(std::size_t round, std::size_t n_honest);

    const std::vector<double>& center() const { return center_; }

private:
    SyntheticSourceConfig config_;
    std::uint64_t seed_;
    std::size_t round_ = 0;
    std::vector<double> center_;
};

}  // namespace bqfl
